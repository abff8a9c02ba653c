#include "dpsim/randomness.h"

#include <bit>
#include <stdexcept>

#include "dpsim/parallel.h"

namespace dpsim {

BitSequence bits_from_string(const std::string& s)
{
    BitSequence b;
    b.reserve(s.size());
    for (char c : s) {
        if (c == '0' || c == '1')
            b.push_back(std::uint8_t(c - '0'));
        else
            throw std::invalid_argument("bits_from_string: unexpected character");
    }
    return b;
}

std::string bits_to_string(const BitSequence& b)
{
    std::string s(b.size(), '0');
    for (std::size_t i = 0; i < b.size(); ++i)
        s[i] = b[i] ? '1' : '0';
    return s;
}

BitSequence positions_to_bitstream(const std::vector<PufResponse>& responses, std::uint32_t cacheline_bits)
{
    if (responses.empty())
        throw std::invalid_argument("positions_to_bitstream: no responses");
    if (cacheline_bits < 2 || !std::has_single_bit(cacheline_bits))
        throw std::invalid_argument("positions_to_bitstream: cacheline_bits must be a power of two >= 2");
    const int width = std::countr_zero(cacheline_bits);
    std::size_t total = 0;
    for (const auto& r : responses)
        total += r.positions.size();
    BitSequence out;
    out.reserve(total * width);
    for (const auto& r : responses)
        for (std::uint32_t p : r.positions) {
            std::uint32_t v = p & (cacheline_bits - 1);
            for (int k = width - 1; k >= 0; --k)
                out.push_back((v >> k) & 1);
        }
    return out;
}

BitSequence von_neumann(const BitSequence& bits, const Prewhitener& prewhiten)
{
    BitSequence tmp;
    const BitSequence* in = &bits;
    if (prewhiten) {
        tmp = prewhiten(bits);
        in = &tmp;
    }
    BitSequence out;
    out.reserve(in->size() / 4);
    for (std::size_t i = 0; i + 1 < in->size(); i += 2) {
        std::uint8_t a = (*in)[i], b = (*in)[i + 1];
        if (a != b)
            out.push_back(a);
    }
    return out;
}

DeviceStream device_stream(const PufDevice& dev, const std::vector<std::uint64_t>& segments, std::uint64_t trial,
                           unsigned threads)
{
    std::vector<PufResponse> resp(segments.size());
    parallel_for(segments.size(), threads, [&](std::size_t i) { resp[i] = dev.read(segments[i], trial); });
    DeviceStream s;
    s.responses = resp.size();
    for (const auto& r : resp)
        s.positions += r.positions.size();
    s.raw = positions_to_bitstream(resp);
    s.extracted = von_neumann(s.raw);
    return s;
}

}  // namespace dpsim
