#pragma once

// Evaluation statistics: Dice over body parts, PCK, AUC/sensitivity/
// specificity, and the one-sided paired Wilcoxon signed-rank test.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spnlab {

struct DiceResult {
    // per class 1..4; absent classes (empty in both masks) carry no value
    std::map<int, double> per_class;
    double mean = 0;  // over present classes
    bool any_class = false;
};

// Per-class Dice 2|P∩G| / (|P|+|G|) over classes 1..4; classes absent from
// both masks are excluded. Background is ignored.
DiceResult dice(const std::vector<uint8_t>& pred, const std::vector<uint8_t>& gt);

// Frames -> video -> corpus aggregation of per-frame results.
struct DiceAggregate {
    std::map<int, double> per_class;  // corpus per-class means
    double mean = 0;                  // corpus mean Dice
    std::vector<double> per_video;    // video means, manifest order
};
DiceAggregate aggregate_dice(const std::vector<std::vector<DiceResult>>& per_video_frames);

// Fraction of visible gt joints whose prediction lies within
// delta * max(bbox_h, bbox_w) pixels (inclusive). Joints: (x,y,vis) triples.
// Returns nullopt when no gt joint is visible.
std::optional<double> pck_frame(const std::vector<float>& pred_xy, const std::vector<float>& gt_xyv,
                                double bbox_h, double bbox_w, double delta);

struct ClassificationMetrics {
    double auc = 0, sensitivity = 0, specificity = 0;
};

// AUC by pairwise comparison with ties credited 0.5; sensitivity/specificity
// at `threshold` (score >= threshold predicts positive). Labels are 0/1.
ClassificationMetrics auc_sens_spec(const std::vector<double>& scores,
                                    const std::vector<int>& labels, double threshold);

// One-sided paired Wilcoxon signed-rank p-value for the alternative
// "differences > 0". Zero differences are dropped; ties get average ranks.
// Exact distribution for n <= 20, normal approximation with tie correction
// above. Requires >= 5 nonzero differences.
enum class WilcoxonMethod { Auto, Exact, Normal };
double wilcoxon_one_sided(const std::vector<double>& differences,
                          WilcoxonMethod method = WilcoxonMethod::Auto);

}  // namespace spnlab
