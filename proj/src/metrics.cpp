#include "spnlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spnlab/error.hpp"
#include "spnlab/stats.hpp"

namespace spnlab {

DiceResult dice(const std::vector<uint8_t>& pred, const std::vector<uint8_t>& gt) {
    if (pred.size() != gt.size()) throw ShapeError("dice: mask sizes differ");
    int64_t inter[5] = {0}, np[5] = {0}, ng[5] = {0};
    for (size_t i = 0; i < pred.size(); ++i) {
        uint8_t p = pred[i], g = gt[i];
        if (p > 4 || g > 4) throw ValidationError("dice: class id out of range");
        ++np[p];
        ++ng[g];
        if (p == g) ++inter[p];
    }
    DiceResult r;
    double sum = 0;
    int count = 0;
    for (int c = 1; c <= 4; ++c) {
        if (np[c] + ng[c] == 0) continue;  // absent from both: excluded
        double d = 2.0 * static_cast<double>(inter[c]) / static_cast<double>(np[c] + ng[c]);
        r.per_class[c] = d;
        sum += d;
        ++count;
    }
    if (count > 0) {
        r.mean = sum / count;
        r.any_class = true;
    }
    return r;
}

DiceAggregate aggregate_dice(const std::vector<std::vector<DiceResult>>& per_video_frames) {
    DiceAggregate agg;
    std::map<int, std::vector<double>> class_video_means;
    for (const auto& frames : per_video_frames) {
        double sum = 0;
        int cnt = 0;
        std::map<int, std::pair<double, int>> cls_acc;
        for (const auto& f : frames) {
            if (!f.any_class) continue;
            sum += f.mean;
            ++cnt;
            for (const auto& [c, d] : f.per_class) {
                cls_acc[c].first += d;
                cls_acc[c].second += 1;
            }
        }
        if (cnt == 0) continue;  // video without scored frames drops out
        agg.per_video.push_back(sum / cnt);
        for (const auto& [c, acc] : cls_acc)
            class_video_means[c].push_back(acc.first / acc.second);
    }
    if (!agg.per_video.empty())
        agg.mean = std::accumulate(agg.per_video.begin(), agg.per_video.end(), 0.0) /
                   static_cast<double>(agg.per_video.size());
    for (const auto& [c, v] : class_video_means)
        agg.per_class[c] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return agg;
}

std::optional<double> pck_frame(const std::vector<float>& pred_xy, const std::vector<float>& gt_xyv,
                                double bbox_h, double bbox_w, double delta) {
    if (delta <= 0) throw ValidationError("pck: delta must be positive");
    size_t J = gt_xyv.size() / 3;
    if (pred_xy.size() < J * 2) throw ShapeError("pck: prediction list shorter than gt joints");
    double thresh = delta * std::max(bbox_h, bbox_w);
    int visible = 0, correct = 0;
    for (size_t j = 0; j < J; ++j) {
        if (gt_xyv[j * 3 + 2] <= 0) continue;
        ++visible;
        double dx = pred_xy[j * 2] - gt_xyv[j * 3];
        double dy = pred_xy[j * 2 + 1] - gt_xyv[j * 3 + 1];
        if (std::sqrt(dx * dx + dy * dy) <= thresh) ++correct;  // inclusive boundary
    }
    if (visible == 0) return std::nullopt;
    return static_cast<double>(correct) / visible;
}

ClassificationMetrics auc_sens_spec(const std::vector<double>& scores,
                                    const std::vector<int>& labels, double threshold) {
    if (scores.size() != labels.size()) throw ShapeError("auc: scores/labels size mismatch");
    int64_t pos = std::count(labels.begin(), labels.end(), 1);
    int64_t neg = static_cast<int64_t>(labels.size()) - pos;
    if (pos == 0 || neg == 0)
        throw ValidationError("auc: both classes must be present");

    double wins = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (size_t k = 0; k < scores.size(); ++k) {
            if (labels[k] != 0) continue;
            if (scores[i] > scores[k])
                wins += 1.0;
            else if (scores[i] == scores[k])
                wins += 0.5;
        }
    }
    ClassificationMetrics m;
    m.auc = wins / (static_cast<double>(pos) * static_cast<double>(neg));
    int64_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        bool predicted_pos = scores[i] >= threshold;
        if (labels[i] == 1)
            predicted_pos ? ++tp : ++fn;
        else
            predicted_pos ? ++fp : ++tn;
    }
    m.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return m;
}

double wilcoxon_one_sided(const std::vector<double>& differences, WilcoxonMethod method) {
    std::vector<double> d;
    for (double v : differences)
        if (v != 0.0) d.push_back(v);
    size_t n = d.size();
    if (n < 5) throw ValidationError("wilcoxon: need at least 5 nonzero differences");

    // average ranks of |d|
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(),
              [&d](size_t a, size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
    std::vector<double> rank(n);
    std::vector<int64_t> tie_sizes;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        tie_sizes.push_back(static_cast<int64_t>(j - i + 1));
        i = j + 1;
    }

    double w_plus = 0;
    for (size_t k = 0; k < n; ++k)
        if (d[k] > 0) w_plus += rank[k];

    bool exact = method == WilcoxonMethod::Exact || (method == WilcoxonMethod::Auto && n <= 20);
    if (exact) {
        // Exact conditional distribution of W+ over all sign assignments,
        // via DP on doubled ranks (average ranks are multiples of 1/2).
        std::vector<int64_t> r2(n);
        int64_t total2 = 0;
        for (size_t k = 0; k < n; ++k) {
            r2[k] = static_cast<int64_t>(std::llround(rank[k] * 2));
            total2 += r2[k];
        }
        std::vector<double> count(static_cast<size_t>(total2) + 1, 0.0);
        count[0] = 1.0;
        for (size_t k = 0; k < n; ++k)
            for (int64_t s = total2 - r2[k]; s >= 0; --s)
                if (count[static_cast<size_t>(s)] > 0)
                    count[static_cast<size_t>(s + r2[k])] += count[static_cast<size_t>(s)];
        int64_t obs2 = static_cast<int64_t>(std::llround(w_plus * 2));
        double ge = 0, all = std::pow(2.0, static_cast<double>(n));
        for (int64_t s = obs2; s <= total2; ++s) ge += count[static_cast<size_t>(s)];
        return ge / all;
    }

    // Normal approximation with tie correction and continuity correction.
    double nn = static_cast<double>(n);
    double mean = nn * (nn + 1) / 4.0;
    double var = nn * (nn + 1) * (2 * nn + 1) / 24.0;
    for (int64_t t : tie_sizes) {
        double td = static_cast<double>(t);
        var -= td * (td * td - 1.0) / 48.0;
    }
    double z = (w_plus - mean - 0.5) / std::sqrt(var);
    return 1.0 - normal_cdf(z);
}

}  // namespace spnlab
