#ifndef ISINGMAP_SPIN_HPP
#define ISINGMAP_SPIN_HPP

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "isingmap/error.hpp"

namespace isingmap {

/// Binary state vector of the system; +1 marks a central hub, -1 a
/// peripheral area. The same mapping is used everywhere.
struct SpinConfiguration {
    std::vector<std::int8_t> spins;

    SpinConfiguration() = default;
    explicit SpinConfiguration(std::vector<std::int8_t> s) : spins(std::move(s)) {}
    SpinConfiguration(std::initializer_list<int> values) {
        spins.reserve(values.size());
        for (int v : values) spins.push_back(static_cast<std::int8_t>(v));
    }

    std::size_t size() const { return spins.size(); }
    bool operator==(const SpinConfiguration&) const = default;
};

struct InvalidSpinError : Error {
    InvalidSpinError(std::size_t index, int value)
        : Error("spin at index " + std::to_string(index) + " is " + std::to_string(value) +
                "; must be -1 or +1") {}
};

inline void validate_spins(const SpinConfiguration& config) {
    for (std::size_t i = 0; i < config.spins.size(); ++i) {
        const int v = config.spins[i];
        if (v != -1 && v != 1) throw InvalidSpinError(i, v);
    }
}

/// All spins set to `value` (default -1).
inline SpinConfiguration uniform_spins(std::size_t n, int value = -1) {
    return SpinConfiguration(std::vector<std::int8_t>(n, static_cast<std::int8_t>(value)));
}

}  // namespace isingmap

#endif
