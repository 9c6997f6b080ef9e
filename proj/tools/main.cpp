#include "app.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace loewner::cli;
    CLI::App app{"Loewner evolution toolkit"};
    app.require_subcommand(1, 1);

    std::string config, out, format;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output file (default: standard output)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    }

    Invocation inv;
    inv.command = app.get_subcommands().front()->get_name();
    inv.config = config;
    if (!out.empty())
        inv.out = out;
    if (!format.empty())
        inv.format = format;
    return run(inv, std::cout, std::cerr);
}
