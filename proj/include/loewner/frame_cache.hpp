#pragma once

#include "loewner/chain.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loewner {

/// Decimal form with 17 significant digits; parses back to the same double.
[[nodiscard]] std::string format_real(double x);

/// CSV with header t,re_a,im_a,re_b,im_b,beta.
void write_frames_csv(std::ostream& os, const std::vector<DecompositionFrame>& frames);
/// Throws InvalidArgument on a malformed table.
[[nodiscard]] std::vector<DecompositionFrame> read_frames_csv(std::istream& is);

/// 64-bit FNV-1a digest, stable across platforms and runs.
[[nodiscard]] std::string content_key(std::string_view text);

/// Directory of frame tables keyed by a content digest. Entries are written
/// once, through a temporary file renamed into place.
class FrameCache {
public:
    explicit FrameCache(std::filesystem::path dir);

    /// Directory from LOEWNER_CACHE_DIR, if set and non-empty.
    static std::optional<FrameCache> from_environment();

    [[nodiscard]] std::optional<std::vector<DecompositionFrame>> load(const std::string& key) const;
    void store(const std::string& key, const std::vector<DecompositionFrame>& frames) const;
    [[nodiscard]] std::filesystem::path path_for(const std::string& key) const;

private:
    std::filesystem::path dir_;
};

/// frames_at, served from the cache when an entry for `key` exists.
[[nodiscard]] std::vector<DecompositionFrame> cached_frames(const HerglotzDriver& d, std::span<const double> times,
                                                            const EvolutionConfig& cfg, const FrameCache* cache,
                                                            const std::string& key);

} // namespace loewner
