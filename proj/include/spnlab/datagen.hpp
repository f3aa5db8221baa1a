#pragma once

// Procedural "articulated infant" video generator: a 2-D figure (head disc,
// torso box, two-segment limbs) animated by joint-angle trajectories, with
// masks and keypoints rasterized from the same geometry.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spnlab/rng.hpp"

namespace spnlab {

constexpr int kNumJoints = 17;  // COCO layout: nose, eyes, ears, shoulders,
                                // elbows, wrists, hips, knees, ankles
constexpr int kNumClasses = 5;  // 0 bg, 1 head, 2 arm, 3 torso, 4 leg

enum class MotionStyle { Smooth, Jerky };

struct GenSpec {
    std::string id = "video";
    int T = 16, H = 32, W = 32;
    MotionStyle motion_style = MotionStyle::Smooth;
    double label_ratio = 1.0;
    // background texture parameters
    int bg_noise_cells = 6;       // value-noise grid resolution
    double illum_drift = 0.04;    // global illumination drift amplitude
    uint64_t seed = 0;
};

struct VideoSample {
    std::string id;
    std::string split = "train";
    int T = 0, H = 0, W = 0;
    std::vector<uint8_t> frames;          // T*H*W*3, RGB
    std::vector<uint8_t> masks;           // labeled_frames.size()*H*W, class ids
    std::vector<int> labeled_frames;      // sorted frame indices carrying masks
    std::vector<float> keypoints;         // T*J*3 (x,y,vis); empty if absent
    std::optional<int> gma_label;         // 0 normal, 1 abnormal

    bool has_keypoints() const { return !keypoints.empty(); }
    const uint8_t* frame(int t) const { return frames.data() + static_cast<size_t>(t) * H * W * 3; }
    // Mask of the i-th labeled frame (index into labeled_frames).
    const uint8_t* mask_at(int labeled_idx) const {
        return masks.data() + static_cast<size_t>(labeled_idx) * H * W;
    }
    // Returns index into labeled_frames, or -1.
    int labeled_index_of(int frame_idx) const {
        for (size_t i = 0; i < labeled_frames.size(); ++i)
            if (labeled_frames[i] == frame_idx) return static_cast<int>(i);
        return -1;
    }
};

// Joint-angle state of the figure at one frame. All lengths in pixels.
struct FigurePose {
    double cx = 0, cy = 0;        // torso center
    double torso_angle = 0;       // radians, 0 = upright
    double torso_w = 0, torso_h = 0;
    double head_r = 0;
    // limb angles, absolute radians: [L arm, R arm, L leg, R leg] x {proximal, distal}
    std::array<double, 8> limb_prox_dist{};
    double upper_arm = 0, forearm = 0, thigh = 0, shin = 0, limb_weight = 0;
};

// Pose trajectory for every frame of a video.
std::vector<FigurePose> animate_figure(const GenSpec& spec);

// Class-mask rasterization (painter order: torso, legs, arms, head).
void rasterize_mask(const FigurePose& pose, int H, int W, uint8_t* mask);

// Keypoints (x, y, visibility); visibility requires in-bounds position and
// the rendered mask class matching the joint's body part.
std::array<float, kNumJoints * 3> figure_keypoints(const FigurePose& pose, int H, int W,
                                                   const uint8_t* mask);

// Body-part class each joint belongs to (head/arm/leg).
uint8_t joint_class(int joint);

VideoSample generate_video(const GenSpec& spec);

// Indices of the ceil(ratio*T) evenly spaced labeled frames.
std::vector<int> evenly_spaced_labels(int T, double ratio);

}  // namespace spnlab
