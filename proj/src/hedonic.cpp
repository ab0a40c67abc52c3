#include "infoquant/hedonic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "infoquant/digest.hpp"

namespace iq {

namespace {

constexpr double kRankTolerance = 1e-10;

const std::vector<InfoTerm> kCanonicalTerms = {InfoTerm::line, InfoTerm::color,
                                               InfoTerm::value, InfoTerm::shape,
                                               InfoTerm::space};

double measure_of(const FeatureVector& fv, InfoTerm t) {
    switch (t) {
        case InfoTerm::line: return fv.v_line;
        case InfoTerm::color: return fv.v_color;
        case InfoTerm::value: return fv.v_value;
        case InfoTerm::shape: return fv.v_shape;
        case InfoTerm::space: return fv.v_space;
    }
    return 0.0;
}

bool has_term(const ModelSpec& spec, InfoTerm t) {
    return std::find(spec.information_terms.begin(), spec.information_terms.end(), t) !=
           spec.information_terms.end();
}

std::string format_sig4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

bool is_info_column(const std::string& name) {
    return name.rfind("log(V_", 0) == 0 || name == "log2(V_line)";
}

bool is_attribute_column(const std::string& name) {
    return name == "Surface" || name == "Surface2" || name == "Age" ||
           name == "Signature" || name == "Dated";
}

}  // namespace

const char* info_term_column(InfoTerm t) {
    switch (t) {
        case InfoTerm::line: return "log(V_line)";
        case InfoTerm::color: return "log(V_color)";
        case InfoTerm::value: return "log(V_value)";
        case InfoTerm::shape: return "log(V_shape)";
        case InfoTerm::space: return "log(V_space)";
    }
    return "";
}

std::optional<int> ModelFit::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<int>(it - names.begin());
}

double ModelFit::coefficient(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw SchemaError("no such coefficient: " + name);
    return coef(*idx);
}

DesignMatrix build_design_matrix(const std::vector<SaleRecord>& records,
                                 const std::vector<FeatureVector>& features,
                                 const ModelSpec& spec) {
    if (records.size() != features.size()) {
        throw AlignmentError("records and features differ in length (" +
                             std::to_string(records.size()) + " vs " +
                             std::to_string(features.size()) + ")");
    }
    if (records.empty()) throw AlignmentError("empty sample");

    const std::size_t n = records.size();

    for (std::size_t i = 0; i < n; ++i) {
        const SaleRecord& r = records[i];
        if (!(r.price_usd > 0.0)) {
            throw DomainError("price must be positive for log transform (record " +
                              r.id + ")");
        }
        for (InfoTerm t : spec.information_terms) {
            if (!(measure_of(features[i], t) > 0.0)) {
                throw DomainError(std::string("information measure ") +
                                  info_term_column(t) + " is not positive (record " +
                                  r.id + ")");
            }
        }
        if (features[i].meta.config_fingerprint != features[0].meta.config_fingerprint) {
            throw ConfigMismatchError("features for record " + r.id +
                                      " come from a different extraction config");
        }
    }

    // Levels actually observed, so declared-but-absent levels emit no column.
    auto observed_levels = [&](auto accessor, const DummyFamily& family) {
        std::set<std::string> seen;
        for (const SaleRecord& r : records) {
            const std::string& label = accessor(r);
            if (std::find(family.levels.begin(), family.levels.end(), label) ==
                family.levels.end()) {
                throw UnknownLevelError("undeclared " + family.name + " level '" + label +
                                        "' (record " + r.id + ")");
            }
            seen.insert(label);
        }
        return seen;
    };

    auto material_seen =
        observed_levels([](const SaleRecord& r) -> const std::string& { return r.material; },
                        spec.material);
    auto city_seen = observed_levels(
        [](const SaleRecord& r) -> const std::string& { return r.city; }, spec.city);
    auto salesroom_seen =
        observed_levels([](const SaleRecord& r) -> const std::string& { return r.salesroom; },
                        spec.salesroom);

    std::set<int> years;
    for (const SaleRecord& r : records) years.insert(r.sale_year);
    const int year_base = spec.year_base.value_or(*years.begin());

    DesignMatrix dm;
    dm.log_scale_factor = spec.log_scale_factor;
    dm.spec_fingerprint = fingerprint(spec);
    dm.feature_fingerprint = features[0].meta.config_fingerprint;
    dm.names.push_back("Constant");
    const bool line_in = has_term(spec, InfoTerm::line);
    if (line_in) dm.names.push_back(info_term_column(InfoTerm::line));
    if (line_in && spec.line_quadratic) dm.names.push_back("log2(V_line)");
    for (InfoTerm t : {InfoTerm::color, InfoTerm::value, InfoTerm::shape, InfoTerm::space}) {
        if (has_term(spec, t)) dm.names.push_back(info_term_column(t));
    }
    dm.names.insert(dm.names.end(), {"Surface", "Surface2", "Age", "Signature", "Dated"});

    struct DummyColumn {
        std::string level;
        const std::string SaleRecord::* field;
    };
    std::vector<DummyColumn> dummy_columns;
    auto declare_dummies = [&](const DummyFamily& family, const std::set<std::string>& seen,
                               const std::string SaleRecord::* field) {
        for (const std::string& level : family.levels) {
            if (level == family.base || seen.find(level) == seen.end()) continue;
            dummy_columns.push_back({level, field});
            dm.names.push_back(family.name + ":" + level);
        }
    };
    declare_dummies(spec.material, material_seen, &SaleRecord::material);
    declare_dummies(spec.city, city_seen, &SaleRecord::city);
    declare_dummies(spec.salesroom, salesroom_seen, &SaleRecord::salesroom);
    std::vector<int> year_columns;
    for (int year : years) {
        if (year == year_base) continue;
        year_columns.push_back(year);
        dm.names.push_back("year:" + std::to_string(year));
    }

    const int k = static_cast<int>(dm.names.size());
    dm.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
    dm.y = Eigen::VectorXd(static_cast<Eigen::Index>(n));
    dm.row_ids.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const SaleRecord& r = records[i];
        const FeatureVector& fv = features[i];
        dm.row_ids.push_back(r.id);
        dm.y(i) = std::log(r.price_usd);

        int c = 0;
        dm.X(i, c++) = 1.0;
        if (line_in) {
            double lv = std::log(spec.log_scale_factor * fv.v_line);
            dm.X(i, c++) = lv;
            if (spec.line_quadratic) dm.X(i, c++) = lv * lv;
        }
        for (InfoTerm t : {InfoTerm::color, InfoTerm::value, InfoTerm::shape, InfoTerm::space}) {
            if (has_term(spec, t)) {
                dm.X(i, c++) = std::log(spec.log_scale_factor * measure_of(fv, t));
            }
        }
        dm.X(i, c++) = r.surface;
        dm.X(i, c++) = r.surface * r.surface;
        dm.X(i, c++) = r.age;
        dm.X(i, c++) = r.signature;
        dm.X(i, c++) = r.dated;
        for (const DummyColumn& dummy : dummy_columns) {
            dm.X(i, c++) = (r.*dummy.field == dummy.level) ? 1.0 : 0.0;
        }
        for (int year : year_columns) {
            dm.X(i, c++) = (r.sale_year == year) ? 1.0 : 0.0;
        }
    }
    return dm;
}

ModelFit ols_fit(const DesignMatrix& dm) {
    const int n = dm.n();
    const int k = dm.k();
    if (n <= k) {
        throw DomainError("need more observations than columns (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dm.X);
    qr.setThreshold(kRankTolerance);
    const int rank = static_cast<int>(qr.rank());
    if (rank < k) {
        // The pivot tail holds the columns rejected as linear combinations
        // of those already selected.
        std::vector<std::string> dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (int j = rank; j < k; ++j) {
            dependent.push_back(dm.names[perm(j)]);
        }
        std::string msg = "design matrix is rank deficient; dependent columns:";
        for (const auto& name : dependent) msg += " " + name;
        throw RankDeficiencyError(msg, std::move(dependent));
    }

    ModelFit fit;
    fit.names = dm.names;
    fit.coef = qr.solve(dm.y);
    fit.residuals = dm.y - dm.X * fit.coef;
    fit.n = n;
    fit.k = k;
    fit.log_scale_factor = dm.log_scale_factor;
    fit.spec_fingerprint = dm.spec_fingerprint;
    fit.feature_fingerprint = dm.feature_fingerprint;

    const double rss = fit.residuals.squaredNorm();
    const double tss = (dm.y.array() - dm.y.mean()).matrix().squaredNorm();
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * (n - 1.0) / (n - k);

    fit.robust_se = robust_standard_errors(dm.X, fit.residuals);
    fit.t_stat = Eigen::VectorXd(k);
    for (int j = 0; j < k; ++j) {
        fit.t_stat(j) = fit.robust_se(j) > 0.0
                            ? fit.coef(j) / fit.robust_se(j)
                            : std::numeric_limits<double>::quiet_NaN();
    }
    return fit;
}

Eigen::VectorXd robust_standard_errors(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& residuals) {
    const int n = static_cast<int>(X.rows());
    const int k = static_cast<int>(X.cols());
    if (residuals.size() != n) throw AlignmentError("residuals do not match X");
    if (n <= k) throw DomainError("need n > k for the HC1 correction");

    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::MatrixXd bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd meat =
        X.transpose() * residuals.array().square().matrix().asDiagonal() * X;
    const Eigen::MatrixXd cov =
        (static_cast<double>(n) / (n - k)) * bread * meat * bread;
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

double predict_log_price(const ModelFit& fit, const std::map<std::string, double>& row) {
    if (static_cast<int>(row.size()) != fit.k) {
        throw SchemaError("row has " + std::to_string(row.size()) + " columns, fit has " +
                          std::to_string(fit.k));
    }
    double acc = 0.0;
    for (int j = 0; j < fit.k; ++j) {
        auto it = row.find(fit.names[j]);
        if (it == row.end()) throw SchemaError("row is missing column " + fit.names[j]);
        acc += fit.coef(j) * it->second;
    }
    return acc;
}

RatioReport price_ratio_report(const ModelFit& fit, const FeatureVector& a,
                               const FeatureVector& b,
                               const std::map<std::string, double>& shared_attrs) {
    if (a.meta.config_fingerprint != b.meta.config_fingerprint) {
        throw ConfigMismatchError("feature vectors come from different configs (" +
                                  hex64(a.meta.config_fingerprint) + " vs " +
                                  hex64(b.meta.config_fingerprint) + ")");
    }
    if (a.meta.width != b.meta.width || a.meta.height != b.meta.height) {
        throw ConfigMismatchError(
            "feature vectors analyzed at different resolutions (" +
            std::to_string(a.meta.width) + "x" + std::to_string(a.meta.height) + " vs " +
            std::to_string(b.meta.width) + "x" + std::to_string(b.meta.height) + ")");
    }
    for (const auto& [name, value] : shared_attrs) {
        (void)value;
        if (is_info_column(name)) {
            throw SchemaError("shared attribute fragment may not set information column " +
                              name);
        }
        if (!fit.index_of(name)) throw SchemaError("unknown shared attribute column " + name);
    }

    auto log_term = [&](const FeatureVector& fv, InfoTerm t) {
        double v = measure_of(fv, t);
        if (!(v > 0.0)) {
            throw DomainError(std::string("information measure ") + info_term_column(t) +
                              " is not positive");
        }
        return std::log(fit.log_scale_factor * v);
    };

    RatioReport report;
    bool any = false;
    for (InfoTerm t : kCanonicalTerms) {
        const std::string column = info_term_column(t);
        if (auto idx = fit.index_of(column)) {
            any = true;
            RatioTerm term;
            term.column = column;
            term.transformed_a = log_term(a, t);
            term.transformed_b = log_term(b, t);
            term.delta = term.transformed_a - term.transformed_b;
            term.contribution = fit.coef(*idx) * term.delta;
            report.terms.push_back(term);
        }
        if (t == InfoTerm::line) {
            if (auto idx = fit.index_of("log2(V_line)")) {
                any = true;
                RatioTerm term;
                term.column = "log2(V_line)";
                double la = log_term(a, InfoTerm::line);
                double lb = log_term(b, InfoTerm::line);
                term.transformed_a = la * la;
                term.transformed_b = lb * lb;
                term.delta = term.transformed_a - term.transformed_b;
                term.contribution = fit.coef(*idx) * term.delta;
                report.terms.push_back(term);
            }
        }
    }
    if (!any) throw MissingTermError("fit contains no information-term columns");

    double log_ratio = 0.0;
    for (const RatioTerm& term : report.terms) log_ratio += term.contribution;
    report.log_ratio = log_ratio;
    report.ratio = std::exp(log_ratio);
    return report;
}

double price_ratio(const ModelFit& fit, const FeatureVector& a, const FeatureVector& b,
                   const std::map<std::string, double>& shared_attrs) {
    return price_ratio_report(fit, a, b, shared_attrs).ratio;
}

std::string significance_stars(double t) {
    if (std::isnan(t)) return "";
    const double p = std::erfc(std::abs(t) / std::sqrt(2.0));  // two-sided normal
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

HypothesisReport hypothesis_report(const ModelFit& fit) {
    for (InfoTerm t : kCanonicalTerms) {
        if (!fit.index_of(info_term_column(t))) {
            throw MissingTermError(std::string("fit is missing ") + info_term_column(t));
        }
    }

    HypothesisReport report;
    auto add_row = [&](const std::string& column, int expected_sign) {
        int idx = *fit.index_of(column);
        HypothesisRow row;
        row.column = column;
        row.coefficient = fit.coef(idx);
        row.se = fit.robust_se(idx);
        row.t = fit.t_stat(idx);
        row.stars = significance_stars(row.t);
        row.expected_sign = expected_sign;
        row.sign_matches = expected_sign > 0 ? row.coefficient > 0.0 : row.coefficient < 0.0;
        report.rows.push_back(row);
    };

    add_row(info_term_column(InfoTerm::line), +1);
    if (fit.index_of("log2(V_line)")) add_row("log2(V_line)", -1);
    for (InfoTerm t : {InfoTerm::color, InfoTerm::value, InfoTerm::shape, InfoTerm::space}) {
        add_row(info_term_column(t), +1);
    }
    return report;
}

std::string HypothesisReport::render() const {
    std::ostringstream out;
    out << "term            coefficient     robust SE       t        stars  expected  match\n";
    for (const HypothesisRow& row : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-15s %-15s %-15s %-8s %-6s %-9s %s\n",
                      row.column.c_str(), format_sig4(row.coefficient).c_str(),
                      format_sig4(row.se).c_str(),
                      std::isnan(row.t) ? "n/a" : format_sig4(row.t).c_str(),
                      row.stars.empty() ? "-" : row.stars.c_str(),
                      row.expected_sign > 0 ? "+" : "-", row.sign_matches ? "yes" : "NO");
        out << line;
    }
    return out.str();
}

std::string render_table(const ModelFit& fit, const std::string& title) {
    struct Entry {
        std::string label;
        int index;
    };
    std::vector<Entry> info, attrs, material, city, salesroom, years;
    int constant_idx = -1;
    for (int j = 0; j < fit.k; ++j) {
        const std::string& name = fit.names[j];
        if (name == "Constant") {
            constant_idx = j;
        } else if (is_info_column(name)) {
            info.push_back({name, j});
        } else if (is_attribute_column(name)) {
            attrs.push_back({name, j});
        } else if (name.rfind("material:", 0) == 0) {
            material.push_back({name.substr(9), j});
        } else if (name.rfind("city:", 0) == 0) {
            city.push_back({name.substr(5), j});
        } else if (name.rfind("salesroom:", 0) == 0) {
            salesroom.push_back({name.substr(10), j});
        } else if (name.rfind("year:", 0) == 0) {
            years.push_back({name.substr(5), j});
        } else {
            attrs.push_back({name, j});
        }
    }

    std::ostringstream out;
    auto value_cell = [&](int j) {
        std::string cell = format_sig4(fit.coef(j));
        cell += significance_stars(fit.t_stat(j));
        cell += " (" + format_sig4(fit.robust_se(j)) + ")";
        return cell;
    };
    auto emit = [&](const std::string& label, const std::string& cell) {
        out << "  ";
        out << label;
        if (label.size() < 24) out << std::string(24 - label.size(), ' ');
        out << "  " << cell << "\n";
    };

    out << "VARIABLES                   " << title << "\n";
    if (!info.empty()) {
        out << "Painting Information\n";
        for (const Entry& e : info) emit(e.label, value_cell(e.index));
    }
    out << "Painting Attribute\n";
    for (const Entry& e : attrs) {
        emit(e.label == "Surface2" ? "Surface^2" : e.label, value_cell(e.index));
    }
    out << "Other Control\n";
    if (!material.empty()) {
        out << "Material\n";
        for (const Entry& e : material) emit(e.label, value_cell(e.index));
    }
    if (!city.empty()) {
        out << "City\n";
        for (const Entry& e : city) emit(e.label, value_cell(e.index));
    }
    if (!salesroom.empty()) {
        out << "Salesroom\n";
        for (const Entry& e : salesroom) emit(e.label, value_cell(e.index));
    }
    if (!years.empty()) {
        out << "Saleyear\n";
        for (const Entry& e : years) emit(e.label + ".year", value_cell(e.index));
    }
    if (constant_idx >= 0) {
        out << "Constant                    " << value_cell(constant_idx) << "\n";
    }
    out << "Observations                " << fit.n << "\n";
    char adj[32];
    std::snprintf(adj, sizeof(adj), "%.3f", fit.adj_r_squared);
    out << "Adj-R-squared               " << adj << "\n";
    out << "Robust standard errors in parentheses. *** p<0.01, ** p<0.05, * p<0.1\n";
    return out.str();
}

std::string fit_json(const ModelFit& fit) {
    nlohmann::json coefficients = nlohmann::json::object();
    nlohmann::json ses = nlohmann::json::object();
    nlohmann::json ts = nlohmann::json::object();
    nlohmann::json stars = nlohmann::json::object();
    for (int j = 0; j < fit.k; ++j) {
        const std::string& name = fit.names[j];
        coefficients[name] = fit.coef(j);
        ses[name] = fit.robust_se(j);
        ts[name] = fit.t_stat(j);  // NaN serializes as null
        stars[name] = significance_stars(fit.t_stat(j));
    }
    nlohmann::json j{{"columns", fit.names},
                     {"coefficients", coefficients},
                     {"robust_se", ses},
                     {"t_stats", ts},
                     {"stars", stars},
                     {"r_squared", fit.r_squared},
                     {"adj_r_squared", fit.adj_r_squared},
                     {"n", fit.n},
                     {"k", fit.k},
                     {"log_scale_factor", fit.log_scale_factor},
                     {"spec_fingerprint", hex64(fit.spec_fingerprint)},
                     {"feature_fingerprint", hex64(fit.feature_fingerprint)}};
    return j.dump(2);
}

ModelFit fit_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ModelFit fit;
    fit.names = j.at("columns").get<std::vector<std::string>>();
    fit.k = static_cast<int>(fit.names.size());
    fit.n = j.at("n").get<int>();
    fit.coef = Eigen::VectorXd(fit.k);
    fit.robust_se = Eigen::VectorXd(fit.k);
    fit.t_stat = Eigen::VectorXd(fit.k);
    for (int c = 0; c < fit.k; ++c) {
        const std::string& name = fit.names[c];
        fit.coef(c) = j.at("coefficients").at(name).get<double>();
        fit.robust_se(c) = j.at("robust_se").at(name).get<double>();
        const auto& t = j.at("t_stats").at(name);
        fit.t_stat(c) =
            t.is_null() ? std::numeric_limits<double>::quiet_NaN() : t.get<double>();
    }
    fit.r_squared = j.at("r_squared").get<double>();
    fit.adj_r_squared = j.at("adj_r_squared").get<double>();
    fit.log_scale_factor = j.at("log_scale_factor").get<double>();
    fit.spec_fingerprint = parse_hex64(j.at("spec_fingerprint").get<std::string>());
    fit.feature_fingerprint = parse_hex64(j.at("feature_fingerprint").get<std::string>());
    return fit;
}

}  // namespace iq
