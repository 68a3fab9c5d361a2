#include "stkit/gridstack.hpp"

#include "stkit/common.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace stkit::gridio {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'T', 'K'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& buf, uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                 char((v >> 24) & 0xff)};
    buf.append(b, 4);
}

uint32_t get_u32(const std::string& buf, size_t& pos) {
    if (pos + 4 > buf.size()) throw Error::runtime("grid stack file truncated in header");
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
    pos += 4;
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

} // namespace

GridStack GridStack::create(uint32_t t, uint32_t c, uint32_t h, uint32_t w,
                            std::vector<std::string> names) {
    require(names.size() == c, "grid stack: channel name count must match C");
    const uint64_t cells = uint64_t(t) * c * h * w;
    require(cells > 0, "grid stack: zero-sized dimension");
    require(cells <= (uint64_t(1) << 32), "grid stack: dimensions too large");
    GridStack s;
    s.n_t = t;
    s.n_c = c;
    s.n_h = h;
    s.n_w = w;
    s.channel_names = std::move(names);
    s.data.assign(size_t(cells), std::numeric_limits<float>::quiet_NaN());
    return s;
}

geo::MaskedGrid GridStack::layer(size_t t, size_t c) const {
    geo::MaskedGrid g(n_h, n_w);
    for (size_t h = 0; h < n_h; ++h)
        for (size_t w = 0; w < n_w; ++w) {
            const float v = at(t, c, h, w);
            if (std::isfinite(v)) g.set(h, w, double(v));
        }
    return g;
}

void GridStack::set_layer(size_t t, size_t c, const geo::MaskedGrid& g) {
    require(g.rows() == n_h && g.cols() == n_w, "grid stack: layer shape mismatch");
    for (size_t h = 0; h < n_h; ++h)
        for (size_t w = 0; w < n_w; ++w)
            set(t, c, h, w,
                g.valid(h, w) ? float(g.at(h, w)) : std::numeric_limits<float>::quiet_NaN());
}

int GridStack::channel_index(const std::string& name) const {
    for (size_t c = 0; c < channel_names.size(); ++c)
        if (channel_names[c] == name) return int(c);
    return -1;
}

void write_grids(const GridStack& s, const std::string& path) {
    const uint64_t cells = uint64_t(s.n_t) * s.n_c * s.n_h * s.n_w;
    require(s.data.size() == cells, "grid stack: payload size does not match dims");

    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, s.n_t);
    put_u32(buf, s.n_c);
    put_u32(buf, s.n_h);
    put_u32(buf, s.n_w);
    for (const auto& name : s.channel_names) {
        put_u32(buf, uint32_t(name.size()));
        buf.append(name);
    }
    const size_t payload_at = buf.size();
    buf.resize(payload_at + s.data.size() * 4);
    for (size_t i = 0; i < s.data.size(); ++i) {
        uint32_t bits;
        std::memcpy(&bits, &s.data[i], 4);
        char* p = buf.data() + payload_at + i * 4;
        p[0] = char(bits & 0xff);
        p[1] = char((bits >> 8) & 0xff);
        p[2] = char((bits >> 16) & 0xff);
        p[3] = char((bits >> 24) & 0xff);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error::runtime("cannot open for writing: " + path);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw Error::runtime("write failed: " + path);
}

GridStack read_grids(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::validation("cannot open grid stack: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    size_t pos = 0;
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw Error::runtime("not a grid stack file (bad magic): " + path);
    pos = 4;
    const uint32_t version = get_u32(buf, pos);
    if (version != kVersion)
        throw Error::runtime("unsupported grid stack version " + std::to_string(version));
    const uint32_t t = get_u32(buf, pos);
    const uint32_t c = get_u32(buf, pos);
    const uint32_t h = get_u32(buf, pos);
    const uint32_t w = get_u32(buf, pos);
    const uint64_t cells = uint64_t(t) * c * h * w;
    if (cells == 0 || cells > (uint64_t(1) << 32))
        throw Error::runtime("grid stack dims out of range");

    std::vector<std::string> names;
    for (uint32_t i = 0; i < c; ++i) {
        const uint32_t len = get_u32(buf, pos);
        if (pos + len > buf.size()) throw Error::runtime("grid stack file truncated in names");
        names.emplace_back(buf.data() + pos, len);
        pos += len;
    }

    if (buf.size() - pos != cells * 4)
        throw Error::runtime("grid stack payload length mismatch (corrupt or truncated)");

    GridStack s = GridStack::create(t, c, h, w, std::move(names));
    for (size_t i = 0; i < s.data.size(); ++i) {
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos + i * 4);
        const uint32_t bits =
            uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
        std::memcpy(&s.data[i], &bits, 4);
    }
    return s;
}

} // namespace stkit::gridio
