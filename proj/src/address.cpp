#include "dpsim/address.h"

#include <stdexcept>

namespace dpsim {

std::string to_string(const Address& a)
{
    return "ch" + std::to_string(a.channel) + ".ra" + std::to_string(a.rank) + ".ba" +
           std::to_string(a.bank) + ".sa" + std::to_string(a.subarray) + ".ro" +
           std::to_string(a.row) + ".co" + std::to_string(a.column);
}

bool in_range(const Address& a, const DramGeometry& g)
{
    return a.channel < g.channels && a.rank < g.ranks_per_channel && a.bank < g.banks_per_rank &&
           a.subarray < g.subarrays_per_bank && a.row < g.rows_per_subarray &&
           a.column < g.row_bits();
}

void check_address(const Address& a, const DramGeometry& g)
{
    if (!in_range(a, g))
        throw std::out_of_range("address out of range: " + to_string(a));
}

std::uint64_t linear_row(const Address& a, const DramGeometry& g)
{
    std::uint64_t r = a.channel;
    r = r * g.ranks_per_channel + a.rank;
    r = r * g.banks_per_rank + a.bank;
    r = r * g.subarrays_per_bank + a.subarray;
    r = r * g.rows_per_subarray + a.row;
    return r;
}

Address row_address(std::uint64_t linear, const DramGeometry& g)
{
    if (linear >= g.total_rows())
        throw std::out_of_range("row index out of range: " + std::to_string(linear));
    Address a;
    a.row = static_cast<std::uint32_t>(linear % g.rows_per_subarray);
    linear /= g.rows_per_subarray;
    a.subarray = static_cast<std::uint32_t>(linear % g.subarrays_per_bank);
    linear /= g.subarrays_per_bank;
    a.bank = static_cast<std::uint32_t>(linear % g.banks_per_rank);
    linear /= g.banks_per_rank;
    a.rank = static_cast<std::uint32_t>(linear % g.ranks_per_channel);
    linear /= g.ranks_per_channel;
    a.channel = static_cast<std::uint32_t>(linear);
    return a;
}

Segment::Segment(const Address& start, std::uint64_t length_bytes, const DramGeometry& g)
    : geom_(g), row_bits_(g.row_bits())
{
    check_address(start, g);
    if (start.column != 0)
        throw std::invalid_argument("segment start must be row aligned: " + to_string(start));
    if (length_bytes == 0 || length_bytes % g.row_size_bytes != 0)
        throw std::invalid_argument("segment length must be a positive multiple of the row size");
    first_row_ = linear_row(start, g);
    rows_ = length_bytes / g.row_size_bytes;
    if (first_row_ + rows_ > g.total_rows())
        throw std::out_of_range("segment extends past the end of the device");
}

Segment Segment::nth(std::uint64_t index, std::uint64_t length_bytes, const DramGeometry& g)
{
    std::uint64_t rows = length_bytes / g.row_size_bytes;
    if (rows == 0 || index >= count(length_bytes, g))
        throw std::out_of_range("segment index out of range: " + std::to_string(index));
    return Segment(row_address(index * rows, g), length_bytes, g);
}

std::uint64_t Segment::count(std::uint64_t length_bytes, const DramGeometry& g)
{
    std::uint64_t rows = length_bytes / g.row_size_bytes;
    return rows == 0 ? 0 : g.total_rows() / rows;
}

Address Segment::address_of(std::uint64_t position) const
{
    if (position >= bits())
        throw std::out_of_range("segment position out of range: " + std::to_string(position));
    Address a = row_address(first_row_ + position / row_bits_, geom_);
    a.column = static_cast<std::uint32_t>(position % row_bits_);
    return a;
}

std::uint64_t Segment::position_of(const Address& a) const
{
    check_address(a, geom_);
    std::uint64_t r = linear_row(a, geom_);
    if (r < first_row_ || r >= first_row_ + rows_)
        throw std::out_of_range("address outside segment: " + to_string(a));
    return (r - first_row_) * row_bits_ + a.column;
}

std::vector<Address> segment_addresses(const Address& start, std::uint64_t length_bytes,
                                       const DramGeometry& g)
{
    Segment s(start, length_bytes, g);
    std::vector<Address> out;
    out.reserve(s.rows());
    for (std::uint64_t i = 0; i < s.rows(); ++i)
        out.push_back(row_address(s.first_row() + i, g));
    return out;
}

}  // namespace dpsim
