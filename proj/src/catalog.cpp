#include "infoquant/catalog.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "infoquant/digest.hpp"
#include "infoquant/manifest.hpp"

namespace iq {

namespace {

/// Minimal RFC-4180 field splitter: quoted fields may contain commas and
/// doubled quotes. No embedded newlines (records are one line each).
std::vector<std::string> split_csv_line(const std::string& line, int row) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError("unterminated quote", row, static_cast<int>(fields.size()) + 1);
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double parse_double_field(const std::string& field, const char* what, int row, int col) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(std::string("cannot parse ") + what + " '" + field + "'", row, col);
    }
    return v;
}

long parse_int_field(const std::string& field, const char* what, int row, int col) {
    long v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(std::string("cannot parse ") + what + " '" + field + "'", row, col);
    }
    return v;
}

void append_double_text(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

std::vector<SaleRecord> load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open catalog " + path.string(), 0);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("catalog is empty", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCatalogHeader) {
        throw ParseError("catalog header mismatch; expected '" +
                             std::string(kCatalogHeader) + "'",
                         1);
    }

    std::vector<SaleRecord> records;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, row);
        if (fields.size() != 11) {
            throw ParseError("expected 11 fields, got " + std::to_string(fields.size()),
                             row, static_cast<int>(fields.size()));
        }
        SaleRecord r;
        r.source_row = row;
        r.id = fields[0];
        r.price_usd = parse_double_field(fields[1], "price_usd", row, 2);
        r.sale_year = static_cast<int>(parse_int_field(fields[2], "sale_year", row, 3));
        r.age = parse_double_field(fields[3], "age", row, 4);
        r.surface = parse_double_field(fields[4], "surface_1000cm2", row, 5);
        r.signature = static_cast<int>(parse_int_field(fields[5], "signature", row, 6));
        r.dated = static_cast<int>(parse_int_field(fields[6], "dated", row, 7));
        r.material = fields[7];
        r.city = fields[8];
        r.salesroom = fields[9];
        r.image_path = fields[10];

        if (r.id.empty()) throw ValidationError("empty id", row);
        if (!(r.price_usd > 0.0)) {
            throw ValidationError("price_usd must be positive, got " + fields[1] +
                                      " (row " + std::to_string(row) + ")",
                                  row);
        }
        if (!(r.surface > 0.0)) {
            throw ValidationError("surface_1000cm2 must be positive, got " + fields[4] +
                                      " (row " + std::to_string(row) + ")",
                                  row);
        }
        if (r.age < 0.0) throw ValidationError("age must be non-negative", row);
        if (r.signature != 0 && r.signature != 1) {
            throw ValidationError("signature must be 0 or 1", row);
        }
        if (r.dated != 0 && r.dated != 1) throw ValidationError("dated must be 0 or 1", row);
        if (r.sale_year < 1000 || r.sale_year > 3000) {
            throw ValidationError("sale_year out of range", row);
        }
        records.push_back(std::move(r));
    }
    return records;
}

void save_catalog(const std::filesystem::path& path,
                  const std::vector<SaleRecord>& records) {
    std::string out = kCatalogHeader;
    out += '\n';
    for (const SaleRecord& r : records) {
        out += csv_escape(r.id);
        out += ',';
        append_double_text(out, r.price_usd);
        out += ',';
        out += std::to_string(r.sale_year);
        out += ',';
        append_double_text(out, r.age);
        out += ',';
        append_double_text(out, r.surface);
        out += ',';
        out += std::to_string(r.signature);
        out += ',';
        out += std::to_string(r.dated);
        out += ',';
        out += csv_escape(r.material);
        out += ',';
        out += csv_escape(r.city);
        out += ',';
        out += csv_escape(r.salesroom);
        out += ',';
        out += csv_escape(r.image_path);
        out += '\n';
    }
    write_file_text(path, out);
}

std::vector<FeatureVector> load_feature_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open features file " + path.string(), 0);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("features file is empty", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != feature_csv_header()) {
        throw ParseError("features header mismatch; expected '" + feature_csv_header() + "'",
                         1);
    }

    std::vector<FeatureVector> features;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, row);
        if (fields.size() != 9) {
            throw ParseError("expected 9 fields, got " + std::to_string(fields.size()), row,
                             static_cast<int>(fields.size()));
        }
        FeatureVector fv;
        fv.meta.source_id = fields[0];
        fv.v_line = parse_double_field(fields[1], "v_line", row, 2);
        fv.v_color = parse_double_field(fields[2], "v_color", row, 3);
        fv.v_value = parse_double_field(fields[3], "v_value", row, 4);
        fv.v_shape = parse_double_field(fields[4], "v_shape", row, 5);
        fv.v_space = parse_double_field(fields[5], "v_space", row, 6);
        fv.meta.width = static_cast<int>(parse_int_field(fields[6], "width", row, 7));
        fv.meta.height = static_cast<int>(parse_int_field(fields[7], "height", row, 8));
        try {
            fv.meta.config_fingerprint = parse_hex64(fields[8]);
        } catch (const std::exception&) {
            throw ParseError("cannot parse config_fingerprint '" + fields[8] + "'", row, 9);
        }
        for (double v : {fv.v_line, fv.v_color, fv.v_value, fv.v_shape, fv.v_space}) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("measures must be finite and non-negative", row);
            }
        }
        if (fv.meta.width < 1 || fv.meta.height < 1) {
            throw ValidationError("analyzed dimensions must be at least 1", row);
        }
        features.push_back(std::move(fv));
    }
    return features;
}

FeatureCache FeatureCache::load(const std::filesystem::path& path) {
    std::map<Key, FeatureVector> entries;
    std::ifstream in(path);
    if (in) {  // absent cache is just empty
        std::string line;
        int row = 0;
        while (std::getline(in, line)) {
            ++row;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError("bad cache line: " + std::string(e.what()), row);
            }
            FeatureVector fv = feature_from_json(j.at("feature_vector").dump());
            const std::string hash = j.at("hash").get<std::string>();
            const std::uint64_t fp =
                parse_hex64(j.at("config_fingerprint").get<std::string>());
            entries[{hash, fp}] = std::move(fv);
        }
    }
    return FeatureCache(std::move(entries));
}

void FeatureCache::save(const std::filesystem::path& path) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string out;
    for (const auto& [key, fv] : entries_) {
        nlohmann::json j{{"hash", key.first},
                         {"config_fingerprint", hex64(key.second)},
                         {"feature_vector", nlohmann::json::parse(feature_json(fv))}};
        out += j.dump();
        out += '\n';
    }
    write_file_text(path, out);
}

std::optional<FeatureVector> FeatureCache::find(const std::string& content_hash,
                                                std::uint64_t config_fingerprint) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find({content_hash, config_fingerprint});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void FeatureCache::insert(const std::string& content_hash, std::uint64_t config_fingerprint,
                          const FeatureVector& fv) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_[{content_hash, config_fingerprint}] = fv;
}

std::size_t FeatureCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

std::filesystem::path cache_path_for(const std::filesystem::path& catalog_path) {
    std::filesystem::path p = catalog_path;
    p += ".features.jsonl";
    return p;
}

std::vector<ExtractOutcome> extract_all(const std::vector<SaleRecord>& records,
                                        const std::filesystem::path& image_root,
                                        const FeatureConfig& cfg, FeatureCache& cache,
                                        const ExtractOptions& options, ExtractStats* stats) {
    const std::uint64_t fp = fingerprint(cfg);

    // Each distinct path is decoded and measured once per run.
    std::vector<std::string> unique_paths;
    std::map<std::string, std::size_t> path_slot;
    for (const SaleRecord& r : records) {
        if (path_slot.emplace(r.image_path, unique_paths.size()).second) {
            unique_paths.push_back(r.image_path);
        }
    }

    struct PathResult {
        std::optional<FeatureVector> features;
        std::string error;
        bool hit = false;
    };
    std::vector<PathResult> per_path(unique_paths.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};

    auto worker = [&]() {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= unique_paths.size()) return;
            PathResult& slot = per_path[i];
            try {
                const auto full = image_root / unique_paths[i];
                const auto bytes = read_file_bytes(full);
                const std::string hash = sha256_hex(bytes);
                if (auto hit = cache.find(hash, fp)) {
                    slot.features = std::move(hit);
                    slot.hit = true;
                    continue;
                }
                RgbRaster raster = decode_image(bytes, unique_paths[i]);
                FeatureVector fv = extract_features(raster, cfg);
                cache.insert(hash, fp, fv);
                slot.features = std::move(fv);
            } catch (const std::exception& e) {
                slot.error = e.what();
                if (options.fail_fast) stop.store(true, std::memory_order_relaxed);
            }
        }
    };

    const int thread_count =
        std::max(1, std::min<int>(options.threads, static_cast<int>(unique_paths.size())));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (stats) {
        for (const PathResult& pr : per_path) {
            if (pr.features) {
                if (pr.hit) {
                    ++stats->cache_hits;
                } else {
                    ++stats->computed;
                }
            }
        }
    }

    std::vector<ExtractOutcome> outcomes(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const PathResult& pr = per_path[path_slot[records[i].image_path]];
        if (pr.features) {
            outcomes[i].features = pr.features;
        } else if (!pr.error.empty()) {
            outcomes[i].error = records[i].id + ": " + pr.error;
        } else {
            outcomes[i].error = records[i].id + ": aborted before processing";
        }
    }
    return outcomes;
}

}  // namespace iq
