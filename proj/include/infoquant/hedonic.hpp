#ifndef INFOQUANT_HEDONIC_HPP
#define INFOQUANT_HEDONIC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infoquant/errors.hpp"
#include "infoquant/features.hpp"

namespace iq {

/// One auction observation.
struct SaleRecord {
    std::string id;
    double price_usd = 0.0;
    int sale_year = 0;
    double age = 0.0;       // years since creation
    double surface = 0.0;   // 1000 cm^2
    int signature = 0;      // {0,1}
    int dated = 0;          // {0,1}
    std::string material;
    std::string city;
    std::string salesroom;
    std::string image_path;
    int source_row = 0;     // 1-based catalog row, for error reporting
};

struct DummyFamily {
    std::string name;
    std::vector<std::string> levels;  // declared levels, base included
    std::string base;                 // never emitted as a column
};

enum class InfoTerm { line, color, value, shape, space };

const char* info_term_column(InfoTerm t);  // e.g. "log(V_line)"

/// Which regressors enter the hedonic equation. The painting attributes
/// (Surface, Surface^2, Age, Signature, Dated) and the control dummies are
/// always present; the information terms vary across specifications.
struct ModelSpec {
    std::vector<InfoTerm> information_terms;
    bool line_quadratic = false;
    double log_scale_factor = 1000.0;  // applied to each measure before log
    DummyFamily material{"material",
                         {"board", "burlap", "canvas", "cardboard", "ceramic", "panel",
                          "paper", "Others"},
                         "Others"};
    DummyFamily city{"city", {"London", "New York", "Paris", "Others"}, "Others"};
    DummyFamily salesroom{"salesroom", {"Christie's", "Sotheby's", "Others"}, "Others"};
    std::optional<int> year_base;  // default: first sale year in the sample
};

std::uint64_t fingerprint(const ModelSpec& spec);

struct DesignMatrix {
    std::vector<std::string> names;  // column names, "Constant" first
    Eigen::MatrixXd X;               // n x k
    Eigen::VectorXd y;               // log price
    std::vector<std::string> row_ids;
    double log_scale_factor = 1000.0;
    std::uint64_t spec_fingerprint = 0;
    std::uint64_t feature_fingerprint = 0;

    int n() const { return static_cast<int>(X.rows()); }
    int k() const { return static_cast<int>(X.cols()); }
};

struct ModelFit {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::VectorXd robust_se;
    Eigen::VectorXd t_stat;  // NaN where the SE is exactly zero
    Eigen::VectorXd residuals;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    int n = 0;
    int k = 0;
    double log_scale_factor = 1000.0;
    std::uint64_t spec_fingerprint = 0;
    std::uint64_t feature_fingerprint = 0;  // config of the features fit on

    std::optional<int> index_of(const std::string& name) const;
    double coefficient(const std::string& name) const;  // SchemaError if absent
};

/// Assembles the design matrix: response = ln(price); each selected
/// information term contributes ln(scale * V) (plus its square for the
/// line quadratic); attributes enter untransformed; dummies are 0/1 with
/// the base level omitted; levels absent from the data contribute no
/// column. An intercept column is always present.
DesignMatrix build_design_matrix(const std::vector<SaleRecord>& records,
                                 const std::vector<FeatureVector>& features,
                                 const ModelSpec& spec);

/// Least squares via column-pivoted QR (never normal equations), rank
/// checked at relative tolerance 1e-10. Robust (HC1) standard errors are
/// filled in. Throws RankDeficiencyError naming the dependent columns.
ModelFit ols_fit(const DesignMatrix& dm);

/// HC1 sandwich: n/(n-k) * (X'X)^-1 X' diag(e_i^2) X (X'X)^-1, diagonal
/// square roots.
Eigen::VectorXd robust_standard_errors(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& residuals);

/// Inner product of the fit coefficients with a named design row. The row
/// must carry exactly the fit's columns.
double predict_log_price(const ModelFit& fit,
                         const std::map<std::string, double>& row);

struct RatioTerm {
    std::string column;
    double transformed_a = 0.0;
    double transformed_b = 0.0;
    double delta = 0.0;         // transformed_a - transformed_b
    double contribution = 0.0;  // coefficient * delta
};

struct RatioReport {
    std::vector<RatioTerm> terms;
    double log_ratio = 0.0;
    double ratio = 1.0;
};

/// Price ratio exp(sum of information-term contrasts) between two feature
/// vectors, everything else equal. Shared attribute columns cancel; the
/// fragment is validated but never enters the contrast. Both vectors must
/// carry the same config fingerprint and analyzed resolution.
RatioReport price_ratio_report(const ModelFit& fit, const FeatureVector& a,
                               const FeatureVector& b,
                               const std::map<std::string, double>& shared_attrs = {});
double price_ratio(const ModelFit& fit, const FeatureVector& a, const FeatureVector& b,
                   const std::map<std::string, double>& shared_attrs = {});

/// "***" p<0.01, "**" p<0.05, "*" p<0.1, two-sided normal approximation.
std::string significance_stars(double t);

struct HypothesisRow {
    std::string column;
    double coefficient = 0.0;
    double se = 0.0;
    double t = 0.0;
    std::string stars;
    int expected_sign = +1;  // -1 for the quadratic line term
    bool sign_matches = false;
};

struct HypothesisReport {
    std::vector<HypothesisRow> rows;
    std::string render() const;
};

/// Sign/significance summary of the five information coefficients (and the
/// quadratic line term when present). Throws MissingTermError if any of the
/// five is absent from the fit.
HypothesisReport hypothesis_report(const ModelFit& fit);

/// Plain-text regression table: coefficient with the robust SE in
/// parentheses and a star suffix, grouped like the published layout.
std::string render_table(const ModelFit& fit, const std::string& title = "log(p)");

std::string fit_json(const ModelFit& fit);
ModelFit fit_from_json(const std::string& text);

}  // namespace iq

#endif  // INFOQUANT_HEDONIC_HPP
