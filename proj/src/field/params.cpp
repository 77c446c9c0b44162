#include "temo/field/params.hpp"

#include "temo/util/error.hpp"

namespace temo::field {

int ParamSet::add(std::string name, ad::Mat value) {
    if (find(name) != -1)
        raise(ErrorKind::Internal, "duplicate parameter name: " + name);
    entries_.push_back({std::move(name), std::move(value)});
    return static_cast<int>(entries_.size()) - 1;
}

int ParamSet::find(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name) return static_cast<int>(i);
    return -1;
}

std::size_t ParamSet::total_size() const {
    std::size_t n = 0;
    for (const Entry& e : entries_) n += e.value.size();
    return n;
}

std::vector<ad::Tensor> ParamSet::leaves(ad::Tape& tape) const {
    std::vector<ad::Tensor> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) out.push_back(tape.leaf(e.value));
    return out;
}

}  // namespace temo::field
