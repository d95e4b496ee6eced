#include "avact/vocabulary.hpp"

#include <algorithm>
#include <unordered_set>

namespace avact {

InstrumentVocabulary::InstrumentVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ConfigError("empty vocabulary");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second) throw ConfigError("duplicate class label '" + n + "'");
}

InstrumentVocabulary InstrumentVocabulary::default_instruments() {
    return InstrumentVocabulary({"Accordion", "Cello", "Drum", "Flute", "Guitar", "Piano", "Saxophone",
                                 "Trumpet", "Violin"});
}

int InstrumentVocabulary::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

bool ClipTags::any() const {
    return std::any_of(v.begin(), v.end(), [](std::uint8_t x) { return x != 0; });
}

}  // namespace avact
