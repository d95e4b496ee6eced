#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "avact/vocabulary.hpp"

namespace avact {

using KeyPoint = std::array<float, 2>;  // (x, y), input-pixel space, origin top-left

// Per-clip key-point annotations on the 1.953125-FPS anchor grid. A
// frame is positive for an instrument iff its key-point set is
// non-empty. Frame indices are integers on our anchor grid; whether the
// source annotations were grid-aligned is an upstream assumption.
struct KeyPointAnnotationSet {
    std::string clip_id;
    double fps = 1.953125;
    int width = 0;   // frame dims, for coordinate bounds
    int height = 0;
    // frame index -> instrument name -> key points (set semantics;
    // order is irrelevant)
    std::map<int, std::map<std::string, std::vector<KeyPoint>>> frames;

    bool positive(int frame, const std::string& instrument) const;
    const std::vector<KeyPoint>* keypoints(int frame, const std::string& instrument) const;
    // Annotated frame indices, sorted.
    std::vector<int> frame_indices() const;
};

// Order-insensitive equality (key-point lists compared as sets).
bool annotations_equal(const KeyPointAnnotationSet& a, const KeyPointAnnotationSet& b);

// JSON schema:
//   {"clip_id": str, "fps": num, "width": int, "height": int,
//    "frames": {"<t>": {"<instrument>": [[x, y], ...]}}}
// An absent instrument key means an empty set. Throws SchemaError with
// a field diagnostic on malformed input or out-of-bounds coordinates.
void save_annotations(const KeyPointAnnotationSet& set, const std::filesystem::path& path);
KeyPointAnnotationSet load_annotations(const std::filesystem::path& path);

}  // namespace avact
