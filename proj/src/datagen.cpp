#include "spnlab/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "spnlab/error.hpp"

namespace spnlab {

namespace {

struct Vec2 {
    double x, y;
};

Vec2 polar(double angle, double len) { return {std::sin(angle) * len, std::cos(angle) * len}; }

double dist_point_segment(double px, double py, Vec2 a, Vec2 b) {
    double vx = b.x - a.x, vy = b.y - a.y;
    double wx = px - a.x, wy = py - a.y;
    double vv = vx * vx + vy * vy;
    double t = vv > 0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

struct Joints {
    Vec2 head, nose, leye, reye, lear, rear;
    Vec2 lsho, rsho, lelb, relb, lwri, rwri;
    Vec2 lhip, rhip, lknee, rknee, lank, rank_;
    Vec2 torso_top, torso_bot;
};

Joints compute_joints(const FigurePose& p) {
    Joints j;
    double ca = std::cos(p.torso_angle), sa = std::sin(p.torso_angle);
    auto local = [&](double lx, double ly) {  // torso frame -> image
        return Vec2{p.cx + lx * ca - ly * sa, p.cy + lx * sa + ly * ca};
    };
    double hw = p.torso_w / 2, hh = p.torso_h / 2;
    j.torso_top = local(0, -hh);
    j.torso_bot = local(0, hh);
    j.head = local(0, -hh - p.head_r * 0.95);
    // face offsets inside the head disc
    j.nose = {j.head.x, j.head.y + p.head_r * 0.15};
    j.leye = {j.head.x - p.head_r * 0.35, j.head.y - p.head_r * 0.25};
    j.reye = {j.head.x + p.head_r * 0.35, j.head.y - p.head_r * 0.25};
    j.lear = {j.head.x - p.head_r * 0.7, j.head.y};
    j.rear = {j.head.x + p.head_r * 0.7, j.head.y};

    j.lsho = local(-hw, -hh * 0.85);
    j.rsho = local(hw, -hh * 0.85);
    j.lhip = local(-hw * 0.7, hh * 0.95);
    j.rhip = local(hw * 0.7, hh * 0.95);

    auto limb = [&](Vec2 root, double prox, double dist, double l1, double l2, Vec2& mid, Vec2& end) {
        Vec2 d1 = polar(prox, l1);
        mid = {root.x + d1.x, root.y + d1.y};
        Vec2 d2 = polar(prox + dist, l2);
        end = {mid.x + d2.x, mid.y + d2.y};
    };
    limb(j.lsho, p.limb_prox_dist[0], p.limb_prox_dist[1], p.upper_arm, p.forearm, j.lelb, j.lwri);
    limb(j.rsho, p.limb_prox_dist[2], p.limb_prox_dist[3], p.upper_arm, p.forearm, j.relb, j.rwri);
    limb(j.lhip, p.limb_prox_dist[4], p.limb_prox_dist[5], p.thigh, p.shin, j.lknee, j.lank);
    limb(j.rhip, p.limb_prox_dist[6], p.limb_prox_dist[7], p.thigh, p.shin, j.rknee, j.rank_);
    return j;
}

}  // namespace

uint8_t joint_class(int joint) {
    if (joint <= 4) return 1;              // face points on the head
    if (joint <= 10) return 2;             // shoulders, elbows, wrists
    return 4;                              // hips, knees, ankles
}

std::vector<int> evenly_spaced_labels(int T, double ratio) {
    int L = static_cast<int>(std::ceil(ratio * T));
    L = std::clamp(L, 0, T);
    std::vector<int> out;
    out.reserve(static_cast<size_t>(L));
    for (int k = 0; k < L; ++k) out.push_back(static_cast<int>(static_cast<int64_t>(k) * T / L));
    return out;
}

std::vector<FigurePose> animate_figure(const GenSpec& spec) {
    Rng rng(mix_seed(spec.seed, spec.id));
    double S = std::min(spec.H, spec.W);

    FigurePose base;
    base.cx = spec.W * rng.uniform(0.42, 0.58);
    base.cy = spec.H * rng.uniform(0.45, 0.6);
    base.torso_w = S * rng.uniform(0.20, 0.24);
    base.torso_h = S * rng.uniform(0.30, 0.36);
    base.head_r = S * rng.uniform(0.10, 0.13);
    base.upper_arm = S * rng.uniform(0.14, 0.17);
    base.forearm = S * rng.uniform(0.12, 0.15);
    base.thigh = S * rng.uniform(0.15, 0.19);
    base.shin = S * rng.uniform(0.13, 0.16);
    base.limb_weight = S * rng.uniform(0.040, 0.052);

    // Rest angles: arms out-down, legs down-out.
    std::array<double, 8> rest = {
        -2.1, -0.5,  // L arm prox (absolute), dist (relative)
        2.1, 0.5,    // R arm
        -0.45, 0.25,  // L leg
        0.45, -0.25,  // R leg
    };

    // Smooth base motion: two sinusoids per channel (8 limb + torso angle + 2
    // translation channels).
    constexpr int kChannels = 11;
    struct Osc {
        double a1, f1, p1, a2, f2, p2;
    };
    std::vector<Osc> osc(kChannels);
    for (auto& o : osc) {
        o.a1 = rng.uniform(0.10, 0.26);
        o.f1 = rng.uniform(0.03, 0.09);
        o.p1 = rng.uniform(0, 2 * M_PI);
        o.a2 = rng.uniform(0.05, 0.13);
        o.f2 = rng.uniform(0.09, 0.2);
        o.p2 = rng.uniform(0, 2 * M_PI);
    }

    // Jerky style: sparse large angle jumps held for a couple of frames.
    std::vector<std::array<double, 8>> jerk(static_cast<size_t>(spec.T), std::array<double, 8>{});
    if (spec.motion_style == MotionStyle::Jerky) {
        for (int t = 1; t < spec.T; ++t) {
            if (rng.bernoulli(0.22)) {
                int hold = rng.uniform_int(1, 2);
                std::array<double, 8> delta{};
                for (int c = 0; c < 8; ++c) {
                    double mag = rng.uniform(0.55, 1.1);
                    delta[static_cast<size_t>(c)] = rng.bernoulli(0.5) ? mag : -mag;
                }
                for (int h = 0; h < hold && t + h < spec.T; ++h)
                    jerk[static_cast<size_t>(t + h)] = delta;
                t += hold;
            }
        }
    }

    std::vector<FigurePose> poses(static_cast<size_t>(spec.T), base);
    for (int t = 0; t < spec.T; ++t) {
        FigurePose& p = poses[static_cast<size_t>(t)];
        auto chan = [&](int c) {
            const Osc& o = osc[static_cast<size_t>(c)];
            return o.a1 * std::sin(2 * M_PI * o.f1 * t + o.p1) +
                   o.a2 * std::sin(2 * M_PI * o.f2 * t + o.p2);
        };
        for (int c = 0; c < 8; ++c)
            p.limb_prox_dist[static_cast<size_t>(c)] =
                rest[static_cast<size_t>(c)] + chan(c) + jerk[static_cast<size_t>(t)][static_cast<size_t>(c)];
        p.torso_angle = 0.18 * chan(8);
        p.cx = base.cx + S * 0.02 * chan(9);
        p.cy = base.cy + S * 0.02 * chan(10);
    }
    return poses;
}

void rasterize_mask(const FigurePose& pose, int H, int W, uint8_t* mask) {
    std::fill(mask, mask + static_cast<size_t>(H) * W, uint8_t(0));
    Joints j = compute_joints(pose);
    double ca = std::cos(pose.torso_angle), sa = std::sin(pose.torso_angle);
    double hw = pose.torso_w / 2, hh = pose.torso_h / 2;
    double r = pose.limb_weight;

    auto paint_capsule = [&](Vec2 a, Vec2 b, double rad, uint8_t cls) {
        int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - rad)));
        int x1 = std::min(W - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + rad)));
        int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - rad)));
        int y1 = std::min(H - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + rad)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (dist_point_segment(x, y, a, b) <= rad)
                    mask[static_cast<size_t>(y) * W + x] = cls;
    };

    // torso: rotated box
    {
        double ext = std::sqrt(hw * hw + hh * hh);
        int x0 = std::max(0, static_cast<int>(std::floor(pose.cx - ext)));
        int x1 = std::min(W - 1, static_cast<int>(std::ceil(pose.cx + ext)));
        int y0 = std::max(0, static_cast<int>(std::floor(pose.cy - ext)));
        int y1 = std::min(H - 1, static_cast<int>(std::ceil(pose.cy + ext)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double dx = x - pose.cx, dy = y - pose.cy;
                double lx = dx * ca + dy * sa, ly = -dx * sa + dy * ca;
                if (std::abs(lx) <= hw && std::abs(ly) <= hh)
                    mask[static_cast<size_t>(y) * W + x] = 3;
            }
    }
    // legs over torso
    paint_capsule(j.lhip, j.lknee, r, 4);
    paint_capsule(j.lknee, j.lank, r * 0.9, 4);
    paint_capsule(j.rhip, j.rknee, r, 4);
    paint_capsule(j.rknee, j.rank_, r * 0.9, 4);
    // arms over legs
    paint_capsule(j.lsho, j.lelb, r, 2);
    paint_capsule(j.lelb, j.lwri, r * 0.9, 2);
    paint_capsule(j.rsho, j.relb, r, 2);
    paint_capsule(j.relb, j.rwri, r * 0.9, 2);
    // head on top
    {
        int x0 = std::max(0, static_cast<int>(std::floor(j.head.x - pose.head_r)));
        int x1 = std::min(W - 1, static_cast<int>(std::ceil(j.head.x + pose.head_r)));
        int y0 = std::max(0, static_cast<int>(std::floor(j.head.y - pose.head_r)));
        int y1 = std::min(H - 1, static_cast<int>(std::ceil(j.head.y + pose.head_r)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double dx = x - j.head.x, dy = y - j.head.y;
                if (dx * dx + dy * dy <= pose.head_r * pose.head_r)
                    mask[static_cast<size_t>(y) * W + x] = 1;
            }
    }
}

std::array<float, kNumJoints * 3> figure_keypoints(const FigurePose& pose, int H, int W,
                                                   const uint8_t* mask) {
    Joints j = compute_joints(pose);
    Vec2 pts[kNumJoints] = {j.nose, j.leye, j.reye, j.lear, j.rear, j.lsho,  j.rsho, j.lelb, j.relb,
                            j.lwri, j.rwri, j.lhip, j.rhip, j.lknee, j.rknee, j.lank, j.rank_};
    std::array<float, kNumJoints * 3> out{};
    for (int k = 0; k < kNumJoints; ++k) {
        double x = pts[k].x, y = pts[k].y;
        int xi = static_cast<int>(std::lround(x)), yi = static_cast<int>(std::lround(y));
        bool vis = xi >= 0 && xi < W && yi >= 0 && yi < H &&
                   mask[static_cast<size_t>(yi) * W + xi] == joint_class(k);
        out[static_cast<size_t>(k) * 3 + 0] = static_cast<float>(x);
        out[static_cast<size_t>(k) * 3 + 1] = static_cast<float>(y);
        out[static_cast<size_t>(k) * 3 + 2] = vis ? 1.0f : 0.0f;
    }
    return out;
}

namespace {

// Seeded value-noise texture in [0,1]: bilinear interpolation of a coarse
// random grid.
struct ValueNoise {
    int gw, gh;
    std::vector<double> grid;
    ValueNoise(Rng& rng, int cells_w, int cells_h) : gw(cells_w + 1), gh(cells_h + 1) {
        grid.resize(static_cast<size_t>(gw) * gh);
        for (auto& v : grid) v = rng.uniform();
    }
    double at(double u, double v) const {  // u,v in [0,1]
        double gx = u * (gw - 1), gy = v * (gh - 1);
        int x0 = std::min(static_cast<int>(gx), gw - 2), y0 = std::min(static_cast<int>(gy), gh - 2);
        double fx = gx - x0, fy = gy - y0;
        double a = grid[static_cast<size_t>(y0) * gw + x0];
        double b = grid[static_cast<size_t>(y0) * gw + x0 + 1];
        double c = grid[static_cast<size_t>(y0 + 1) * gw + x0];
        double d = grid[static_cast<size_t>(y0 + 1) * gw + x0 + 1];
        return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
    }
};

}  // namespace

VideoSample generate_video(const GenSpec& spec) {
    if (spec.T < 2) throw ValidationError("generate_video: T must be >= 2");
    if (spec.label_ratio < 0 || spec.label_ratio > 1)
        throw ValidationError("generate_video: label_ratio must lie in [0,1]");

    VideoSample s;
    s.id = spec.id;
    s.T = spec.T;
    s.H = spec.H;
    s.W = spec.W;
    s.gma_label = spec.motion_style == MotionStyle::Jerky ? 1 : 0;

    auto poses = animate_figure(spec);

    Rng brng(mix_seed(mix_seed(spec.seed, spec.id), "background"));
    ValueNoise noise(brng, spec.bg_noise_cells, spec.bg_noise_cells);
    double bg_base[3] = {brng.uniform(0.25, 0.55), brng.uniform(0.25, 0.55), brng.uniform(0.3, 0.6)};
    int n_rects = brng.uniform_int(1, 3);
    struct Rect {
        int x0, y0, x1, y1;
        double shade[3];
    };
    std::vector<Rect> rects;
    for (int i = 0; i < n_rects; ++i) {
        int x0 = brng.uniform_int(0, spec.W - 2), y0 = brng.uniform_int(0, spec.H - 2);
        int x1 = std::min(spec.W - 1, x0 + brng.uniform_int(4, spec.W / 2));
        int y1 = std::min(spec.H - 1, y0 + brng.uniform_int(4, spec.H / 2));
        Rect rc{x0, y0, x1, y1, {brng.uniform(-0.18, 0.18), brng.uniform(-0.18, 0.18), brng.uniform(-0.18, 0.18)}};
        rects.push_back(rc);
    }
    double drift_phase = brng.uniform(0, 2 * M_PI);
    double drift_freq = brng.uniform(0.02, 0.06);
    // body part palette, slightly varied per video
    double palette[5][3] = {
        {0, 0, 0},
        {0.85 + brng.uniform(-0.05, 0.05), 0.65, 0.55},  // head
        {0.75, 0.75 + brng.uniform(-0.05, 0.05), 0.35},  // arm
        {0.80, 0.45, 0.45 + brng.uniform(-0.05, 0.05)},  // torso
        {0.45, 0.55, 0.80 + brng.uniform(-0.05, 0.05)},  // leg
    };

    s.labeled_frames = evenly_spaced_labels(spec.T, spec.label_ratio);
    s.frames.resize(static_cast<size_t>(spec.T) * spec.H * spec.W * 3);
    s.masks.resize(s.labeled_frames.size() * static_cast<size_t>(spec.H) * spec.W);
    s.keypoints.resize(static_cast<size_t>(spec.T) * kNumJoints * 3);

    std::vector<uint8_t> mask(static_cast<size_t>(spec.H) * spec.W);
    Rng prng(mix_seed(mix_seed(spec.seed, spec.id), "pixel-noise"));
    size_t next_labeled = 0;
    for (int t = 0; t < spec.T; ++t) {
        const FigurePose& pose = poses[static_cast<size_t>(t)];
        rasterize_mask(pose, spec.H, spec.W, mask.data());
        auto kp = figure_keypoints(pose, spec.H, spec.W, mask.data());
        std::copy(kp.begin(), kp.end(), s.keypoints.begin() + static_cast<size_t>(t) * kNumJoints * 3);

        double illum = 1.0 + spec.illum_drift * std::sin(2 * M_PI * drift_freq * t + drift_phase);
        uint8_t* frame = s.frames.data() + static_cast<size_t>(t) * spec.H * spec.W * 3;
        for (int y = 0; y < spec.H; ++y) {
            for (int x = 0; x < spec.W; ++x) {
                double rgb[3];
                uint8_t cls = mask[static_cast<size_t>(y) * spec.W + x];
                if (cls == 0) {
                    double nv = noise.at(static_cast<double>(x) / (spec.W - 1),
                                         static_cast<double>(y) / (spec.H - 1));
                    for (int c = 0; c < 3; ++c) rgb[c] = bg_base[c] * (0.7 + 0.6 * nv);
                    for (const auto& rc : rects)
                        if (x >= rc.x0 && x <= rc.x1 && y >= rc.y0 && y <= rc.y1)
                            for (int c = 0; c < 3; ++c) rgb[c] += rc.shade[c];
                } else {
                    for (int c = 0; c < 3; ++c) rgb[c] = palette[cls][c];
                }
                double grain = prng.uniform(-0.02, 0.02);
                for (int c = 0; c < 3; ++c) {
                    double v = (rgb[c] + grain) * illum;
                    frame[(static_cast<size_t>(y) * spec.W + x) * 3 + c] =
                        static_cast<uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
                }
            }
        }
        if (next_labeled < s.labeled_frames.size() && s.labeled_frames[next_labeled] == t) {
            std::copy(mask.begin(), mask.end(),
                      s.masks.begin() + next_labeled * static_cast<size_t>(spec.H) * spec.W);
            ++next_labeled;
        }
    }
    return s;
}

}  // namespace spnlab
