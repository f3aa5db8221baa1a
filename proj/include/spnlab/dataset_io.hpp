#pragma once

// On-disk dataset layout: manifest.json at the root; per-video subdirectory
// with frame_%05d.ppm (binary P6) for all frames and mask_%05d.pgm (binary
// P5, raw class indices) for labeled frames.

#include <string>
#include <vector>

#include "spnlab/datagen.hpp"

namespace spnlab {

void write_ppm(const std::string& path, const uint8_t* rgb, int H, int W);
std::vector<uint8_t> read_ppm(const std::string& path, int& H, int& W);
void write_pgm(const std::string& path, const uint8_t* gray, int H, int W);
std::vector<uint8_t> read_pgm(const std::string& path, int& H, int& W);

void write_dataset(const std::vector<VideoSample>& samples, const std::string& dir);
std::vector<VideoSample> read_dataset(const std::string& dir);

// Views of one split ("train"/"test"); pointers into `samples`.
std::vector<const VideoSample*> split_of(const std::vector<VideoSample>& samples,
                                         const std::string& split);

}  // namespace spnlab
