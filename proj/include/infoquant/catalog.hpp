#ifndef INFOQUANT_CATALOG_HPP
#define INFOQUANT_CATALOG_HPP

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "infoquant/features.hpp"
#include "infoquant/hedonic.hpp"

namespace iq {

inline constexpr const char* kCatalogHeader =
    "id,price_usd,sale_year,age,surface_1000cm2,signature,dated,material,city,"
    "salesroom,image_path";

/// Reads and validates the catalog CSV. The header is positional and must
/// match kCatalogHeader exactly.
std::vector<SaleRecord> load_catalog(const std::filesystem::path& path);
void save_catalog(const std::filesystem::path& path,
                  const std::vector<SaleRecord>& records);

/// Feature rows as written by the extract command.
std::vector<FeatureVector> load_feature_csv(const std::filesystem::path& path);

/// Maps (image content hash, config fingerprint) to the features computed
/// for that image. Persisted as JSON lines beside the catalog. Thread safe;
/// hits are bitwise identical to recomputation.
class FeatureCache {
public:
    FeatureCache() = default;

    static FeatureCache load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::optional<FeatureVector> find(const std::string& content_hash,
                                      std::uint64_t config_fingerprint) const;
    void insert(const std::string& content_hash, std::uint64_t config_fingerprint,
                const FeatureVector& fv);
    std::size_t size() const;

private:
    using Key = std::pair<std::string, std::uint64_t>;

    explicit FeatureCache(std::map<Key, FeatureVector> entries)
        : entries_(std::move(entries)) {}

    mutable std::mutex mutex_;
    std::map<Key, FeatureVector> entries_;
};

/// Default cache location for a catalog file.
std::filesystem::path cache_path_for(const std::filesystem::path& catalog_path);

struct ExtractOptions {
    bool fail_fast = false;
    int threads = 1;
};

struct ExtractStats {
    int computed = 0;
    int cache_hits = 0;
};

struct ExtractOutcome {
    std::optional<FeatureVector> features;  // empty on failure
    std::string error;                      // empty on success
};

/// Computes features for every record under one shared config, consulting
/// and populating the cache. Results come back in input order regardless of
/// the thread count; per-record failures are collected, not thrown.
std::vector<ExtractOutcome> extract_all(const std::vector<SaleRecord>& records,
                                        const std::filesystem::path& image_root,
                                        const FeatureConfig& cfg, FeatureCache& cache,
                                        const ExtractOptions& options = {},
                                        ExtractStats* stats = nullptr);

}  // namespace iq

#endif  // INFOQUANT_CATALOG_HPP
