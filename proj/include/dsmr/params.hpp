#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "dsmr/tensor.hpp"

namespace dsmr {

// Named parameter set for one network. Entry order is creation order and is
// the canonical serialization order; names are stable across runs.
template <typename T>
class ParamStore {
public:
    enum class Kind { Trainable, Buffer };

    struct Entry {
        std::string name;
        Tensor<T> tensor;
        Kind kind;
    };

    Tensor<T>& create(const std::string& name, Shape shape, Kind kind) {
        if (index_.count(name))
            throw IntegrityError("parameter name already exists: " + name);
        entries_.push_back({name, Tensor<T>::zeros(shape, kind == Kind::Trainable), kind});
        index_[name] = entries_.size() - 1;
        return entries_.back().tensor;
    }

    bool contains(const std::string& name) const { return index_.count(name) > 0; }

    Tensor<T>& get(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw IntegrityError("missing parameter " + name);
        return entries_[it->second].tensor;
    }
    const Tensor<T>& get(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw IntegrityError("missing parameter " + name);
        return entries_[it->second].tensor;
    }

    const std::vector<Entry>& entries() const { return entries_; }

    std::vector<Tensor<T>> trainable() const {
        std::vector<Tensor<T>> out;
        for (const auto& e : entries_)
            if (e.kind == Kind::Trainable) out.push_back(e.tensor);
        return out;
    }

    std::vector<std::string> trainable_names() const {
        std::vector<std::string> out;
        for (const auto& e : entries_)
            if (e.kind == Kind::Trainable) out.push_back(e.name);
        return out;
    }

    int64_t trainable_element_count() const {
        int64_t acc = 0;
        for (const auto& e : entries_)
            if (e.kind == Kind::Trainable) acc += e.tensor.size();
        return acc;
    }

    void zero_grads() {
        for (auto& e : entries_)
            if (e.kind == Kind::Trainable) e.tensor.zero_grad();
    }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, size_t> index_;
};

} // namespace dsmr
