#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "avact/clip.hpp"

namespace avact {

// On-disk corpus layout:
//   <root>/clips/<clip_id>/clip.json      {"clip_id", "frame_fps", "tags": [names]}
//   <root>/clips/<clip_id>/frames/%05d.png
//   <root>/clips/<clip_id>/audio.wav      16 kHz 16-bit mono PCM
//   <root>/annotations/<clip_id>.json     key-point schema
//   <root>/truth/<clip_id>.*.tnsr         synthetic ground truth, when present
void save_clip(const VideoClip& clip, const InstrumentVocabulary& vocab,
               const std::filesystem::path& corpus_root);
VideoClip load_clip(const std::filesystem::path& corpus_root, const std::string& clip_id,
                    const InstrumentVocabulary& vocab);
std::vector<std::string> list_clips(const std::filesystem::path& corpus_root);

}  // namespace avact
