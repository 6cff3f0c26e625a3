#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "locdb/index/access_stats.hpp"

namespace locdb {

/// Where a direct file lives. Only affects the cost model; no I/O is done.
enum class Residency { Memory, Disk };

/// Direct-addressed file: the entry for key k lives at slot k - base. Space is
/// reserved for every admissible key up front.
class DirectFile {
public:
    DirectFile(Ptn base, std::size_t capacity, Residency residency = Residency::Memory);

    /// Throws KeyRangeError outside [base, base + capacity).
    AccessStats put(Ptn key, Payload entry);
    LookupResult get(Ptn key) const;
    AccessStats erase(Ptn key);

    Ptn base() const noexcept { return base_; }
    std::size_t capacity() const noexcept { return slots_.size(); }
    std::size_t occupied() const noexcept { return occupied_; }
    Residency residency() const noexcept { return residency_; }

private:
    std::size_t slot_of(Ptn key) const;

    Ptn base_;
    std::vector<std::optional<Payload>> slots_;
    std::size_t occupied_ = 0;
    Residency residency_;
};

}  // namespace locdb
