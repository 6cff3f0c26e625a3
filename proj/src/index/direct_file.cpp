#include "locdb/index/direct_file.hpp"

#include <string>

#include "locdb/error.hpp"

namespace locdb {

DirectFile::DirectFile(Ptn base, std::size_t capacity, Residency residency)
    : base_(base), slots_(capacity), residency_(residency) {}

std::size_t DirectFile::slot_of(Ptn key) const {
    if (key < base_ || key - base_ >= slots_.size()) {
        throw KeyRangeError("key " + std::to_string(key) + " outside reserved range [" +
                            std::to_string(base_) + ", " +
                            std::to_string(base_ + slots_.size()) + ")");
    }
    return static_cast<std::size_t>(key - base_);
}

AccessStats DirectFile::put(Ptn key, Payload entry) {
    auto& slot = slots_[slot_of(key)];
    if (!slot) {
        ++occupied_;
    }
    slot = entry;
    AccessStats stats;
    stats.slot_accesses = 1;
    return stats;
}

LookupResult DirectFile::get(Ptn key) const {
    const auto& slot = slots_[slot_of(key)];
    LookupResult result;
    result.found = slot.has_value();
    result.payload = slot;
    result.stats.slot_accesses = 1;
    return result;
}

AccessStats DirectFile::erase(Ptn key) {
    auto& slot = slots_[slot_of(key)];
    if (slot) {
        --occupied_;
        slot.reset();
    }
    AccessStats stats;
    stats.slot_accesses = 1;
    return stats;
}

}  // namespace locdb
