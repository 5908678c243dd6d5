#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vts/types.hpp"

namespace vts::quality {

struct RecommenderConfig {
    int k_clusters = 1;
    int t_max = 25;  ///< rows kept per character-feature matrix
    double ridge_lambda = 1e-3;
};

/// No correctly recognized features were available to estimate a template.
class NoTemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Template {
    CharFeatures features;  ///< t_max x d
    int source_count = 0;
};

/// Zero-pads or truncates to `t_max` rows of width `dim` and flattens row-major.
[[nodiscard]] Vec pad_flatten(const CharFeatures& f, int t_max, int dim);

struct KMeansResult {
    std::vector<Vec> centroids;
    std::vector<int> labels;
    std::vector<int> sizes;
};

/// Lloyd's algorithm with deterministic farthest-point initialization starting at the first point.
[[nodiscard]] KMeansResult kmeans(std::span<const Vec> points, int k, int max_iterations = 100);

/// Centroid of the largest k-means cluster of the padded correct features.
[[nodiscard]] Template estimate_template(std::span<const CharFeatures> correct_features,
                                         const RecommenderConfig& cfg = {});

/// Cosine similarity of the flattened, padded features.
[[nodiscard]] double teacher_score(const CharFeatures& region_features, const Template& tmpl, int t_max = 25);

struct TeacherResult {
    std::vector<double> scores;  ///< one per observation
    bool used_fallback = false;  ///< no correct observation; scores are mean char probabilities
    int correct_count = 0;
};

/// Teacher labels for one stream: template from observations whose text equals `transcript`
/// exactly, then cosine scores. Observations without a hypothesis score 0.
[[nodiscard]] TeacherResult teacher_scores(const TextStream& stream, const std::string& transcript,
                                           const RecommenderConfig& cfg = {});

class StudentModel {
public:
    virtual ~StudentModel() = default;
    [[nodiscard]] virtual double predict(const RegionObservation& obs) const = 0;
};

/// Returns the observation's stored teacher score.
class PassthroughStudent final : public StudentModel {
public:
    [[nodiscard]] double predict(const RegionObservation& obs) const override;
};

/// Linear regressor from the observation embedding to the teacher score.
class RidgeStudent final : public StudentModel {
public:
    RidgeStudent() = default;
    RidgeStudent(Vec weights, double intercept) : weights_(std::move(weights)), intercept_(intercept), fitted_(true) {}

    [[nodiscard]] double predict(const RegionObservation& obs) const override;
    [[nodiscard]] double predict(std::span<const double> embedding) const;
    [[nodiscard]] bool fitted() const noexcept { return fitted_; }
    [[nodiscard]] const Vec& weights() const noexcept { return weights_; }
    [[nodiscard]] double intercept() const noexcept { return intercept_; }

    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] static RidgeStudent from_json(const std::string& text);

private:
    Vec weights_;
    double intercept_ = 0.0;
    bool fitted_ = false;
};

struct TrainingSample {
    Vec embedding;
    double teacher_score = 0.0;
};

/// Minimizes mean squared error + ridge_lambda * |w|^2 with an unpenalized intercept.
/// Rank-deficient systems take the minimum-norm solution.
[[nodiscard]] RidgeStudent fit_student(std::span<const TrainingSample> training, double ridge_lambda);

enum class SelectionPolicy { TR, PCW, HFP };

[[nodiscard]] const char* to_string(SelectionPolicy p) noexcept;
[[nodiscard]] std::optional<SelectionPolicy> parse_policy(const std::string& s) noexcept;

/// Picks exactly one observation of the stream. Ties choose the earliest frame.
[[nodiscard]] StreamDecision select(const TextStream& stream, SelectionPolicy policy);

}  // namespace vts::quality
