#ifndef DPSIM_ADDRESS_H
#define DPSIM_ADDRESS_H

#include <cstdint>
#include <string>
#include <vector>

#include "dpsim/config.h"

namespace dpsim {

// row is the row index inside its subarray; column is a bit index in the row.
struct Address {
    std::uint32_t channel = 0;
    std::uint32_t rank = 0;
    std::uint32_t bank = 0;
    std::uint32_t subarray = 0;
    std::uint32_t row = 0;
    std::uint32_t column = 0;

    bool operator==(const Address&) const = default;
};

std::string to_string(const Address& a);

bool in_range(const Address& a, const DramGeometry& g);
void check_address(const Address& a, const DramGeometry& g);  // throws std::out_of_range

// Device-wide row order: channel, rank, bank, subarray, row (row fastest).
std::uint64_t linear_row(const Address& a, const DramGeometry& g);
Address row_address(std::uint64_t linear, const DramGeometry& g);

// Row addresses (column 0) covered by a segment. start must be row aligned.
std::vector<Address> segment_addresses(const Address& start, std::uint64_t length_bytes,
                                       const DramGeometry& g);

// Bit position <-> address over a row-aligned contiguous segment.
class Segment {
  public:
    Segment(const Address& start, std::uint64_t length_bytes, const DramGeometry& g);
    // Segment number `index` of `length_bytes` each, counted from row 0.
    static Segment nth(std::uint64_t index, std::uint64_t length_bytes, const DramGeometry& g);
    static std::uint64_t count(std::uint64_t length_bytes, const DramGeometry& g);

    std::uint64_t bits() const { return rows_ * row_bits_; }
    std::uint64_t rows() const { return rows_; }
    std::uint64_t first_row() const { return first_row_; }

    Address address_of(std::uint64_t position) const;
    std::uint64_t position_of(const Address& a) const;

  private:
    DramGeometry geom_;
    std::uint64_t first_row_;
    std::uint64_t rows_;
    std::uint64_t row_bits_;
};

}  // namespace dpsim

#endif
