#pragma once

#include <string>
#include <vector>

#include "temo/ad/tape.hpp"

namespace temo::field {

// Registry of named trainable matrices. Values live here between
// iterations; each iteration loads them onto a fresh tape as leaves, in
// registration order, so params[i] pairs with leaves(tape)[i].
class ParamSet {
public:
    struct Entry {
        std::string name;
        ad::Mat value;
    };

    int add(std::string name, ad::Mat value);
    int find(const std::string& name) const;  // -1 when absent

    std::size_t count() const { return entries_.size(); }
    std::size_t total_size() const;

    Entry& entry(int i) { return entries_[static_cast<std::size_t>(i)]; }
    const Entry& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }

    std::vector<ad::Tensor> leaves(ad::Tape& tape) const;

private:
    std::vector<Entry> entries_;
};

}  // namespace temo::field
