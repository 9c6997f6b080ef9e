#include "loewner/frame_cache.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace loewner {

namespace fs = std::filesystem;

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_frames_csv(std::ostream& os, const std::vector<DecompositionFrame>& frames)
{
    os << "t,re_a,im_a,re_b,im_b,beta\n";
    for (const auto& f : frames)
        os << format_real(f.t) << ',' << format_real(f.a.real()) << ',' << format_real(f.a.imag()) << ','
           << format_real(f.b.real()) << ',' << format_real(f.b.imag()) << ',' << format_real(f.beta) << '\n';
}

std::vector<DecompositionFrame> read_frames_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "t,re_a,im_a,re_b,im_b,beta")
        throw InvalidArgument("frame table: missing or unexpected header");
    std::vector<DecompositionFrame> out;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty())
            continue;
        double v[6];
        const char* p = line.data();
        const char* end = p + line.size();
        for (int k = 0; k < 6; ++k) {
            auto [next, ec] = std::from_chars(p, end, v[k]);
            if (ec != std::errc{} || (k < 5 && (next == end || *next != ',')) || (k == 5 && next != end))
                throw InvalidArgument("frame table: malformed row " + std::to_string(row));
            p = next + 1;
        }
        out.push_back({v[0], {v[1], v[2]}, {v[3], v[4]}, v[5]});
    }
    return out;
}

std::string content_key(std::string_view text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FrameCache::FrameCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<FrameCache> FrameCache::from_environment()
{
    const char* dir = std::getenv("LOEWNER_CACHE_DIR");
    if (!dir || !*dir)
        return std::nullopt;
    return FrameCache(dir);
}

fs::path FrameCache::path_for(const std::string& key) const
{
    return dir_ / ("frames-" + key + ".csv");
}

std::optional<std::vector<DecompositionFrame>> FrameCache::load(const std::string& key) const
{
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in)
        return std::nullopt;
    try {
        return read_frames_csv(in);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

void FrameCache::store(const std::string& key, const std::vector<DecompositionFrame>& frames) const
{
    static std::atomic<unsigned> counter{0};
    fs::create_directories(dir_);
    const fs::path target = path_for(key);
    const fs::path tmp = dir_ / (target.filename().string() + ".tmp." + std::to_string(::getpid()) + "."
                                 + std::to_string(counter++));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InvalidArgument("cannot write cache file " + tmp.string());
        write_frames_csv(out, frames);
        if (!out.flush())
            throw InvalidArgument("cannot write cache file " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::vector<DecompositionFrame> cached_frames(const HerglotzDriver& d, std::span<const double> times,
                                              const EvolutionConfig& cfg, const FrameCache* cache,
                                              const std::string& key)
{
    if (cache)
        if (auto hit = cache->load(key); hit && hit->size() == times.size())
            return *hit;
    auto frames = frames_at(d, times, cfg);
    if (cache)
        cache->store(key, frames);
    return frames;
}

} // namespace loewner
