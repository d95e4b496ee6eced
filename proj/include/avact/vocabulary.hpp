#pragma once

#include <string>
#include <vector>

#include "avact/errors.hpp"

namespace avact {

// Ordered instrument class labels; index g in [0, size()).
class InstrumentVocabulary {
public:
    explicit InstrumentVocabulary(std::vector<std::string> names);

    // The nine default instrument classes, alphabetical.
    static InstrumentVocabulary default_instruments();

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t g) const { return names_.at(g); }
    const std::vector<std::string>& names() const { return names_; }
    // -1 if unknown.
    int index_of(const std::string& name) const;

private:
    std::vector<std::string> names_;
};

// Multi-hot clip tag vector, one entry per vocabulary class.
struct ClipTags {
    std::vector<std::uint8_t> v;

    std::size_t size() const { return v.size(); }
    bool positive(std::size_t g) const { return v.at(g) != 0; }
    bool any() const;
};

}  // namespace avact
