#include "cmot/frames.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cmot {

namespace {

constexpr char kMagic[8] = {'C', 'M', 'O', 'T', 'F', 'R', 'M', '1'};

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

class Writer {
public:
    void u32(std::uint32_t v) { raw(to_little(v)); }
    void f64(double v) { raw(to_little(std::bit_cast<std::uint64_t>(v))); }
    void bytes(const void* p, std::size_t n) {
        auto c = static_cast<const unsigned char*>(p);
        buf.insert(buf.end(), c, c + n);
    }
    std::vector<unsigned char> buf;

private:
    template <class T>
    void raw(T v) {
        bytes(&v, sizeof(T));
    }
};

class Reader {
public:
    Reader(const std::vector<unsigned char>& b, const std::string& path) : buf_(b), path_(path) {}

    std::uint32_t u32() { return to_little(raw<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(to_little(raw<std::uint64_t>())); }
    void bytes(void* out, std::size_t n) {
        need(n);
        std::memcpy(out, buf_.data() + at_, n);
        at_ += n;
    }
    std::size_t remaining() const { return buf_.size() - at_; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw FrameIoError("frame archive '" + path_ + "': " + msg);
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail("truncated file");
    }
    template <class T>
    T raw() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }
    const std::vector<unsigned char>& buf_;
    std::string path_;
    std::size_t at_ = 0;
};

}  // namespace

const FrameField* FrameArchive::find(const std::string& name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

FrameArchive make_frame_archive(const Solution& solution, const TransportProblem& problem) {
    const GridSpec& g = solution.grid;
    FrameArchive a;
    a.grid = g;
    a.iterations = static_cast<std::uint32_t>(solution.iterations);
    a.energy = solution.energy;
    const auto slots = static_cast<std::uint32_t>(g.slots());
    const auto nodes = static_cast<std::uint32_t>(g.nt);
    a.fields.push_back({"density", nodes, density_frames(solution.mu(), problem.rho0, problem.rho1)});
    auto mx = solution.mu().vector(0);
    auto my = solution.mu().vector(1);
    a.fields.push_back({"momentum_x", slots, {mx.begin(), mx.end()}});
    a.fields.push_back({"momentum_y", slots, {my.begin(), my.end()}});
    a.fields.push_back({"phi", nodes, solution.phi().values});
    return a;
}

void write_frames(const FrameArchive& a, const std::filesystem::path& path) {
    const GridSpec& g = a.grid;
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kFrameFormatVersion);
    w.u32(static_cast<std::uint32_t>(g.nt));
    w.u32(static_cast<std::uint32_t>(g.nx));
    w.u32(static_cast<std::uint32_t>(g.ny));
    w.u32(g.space_bc == SpaceBc::Periodic ? 0u : 1u);
    w.f64(g.lx);
    w.f64(g.ly);
    w.f64(g.dt());
    w.f64(g.dx());
    w.f64(g.dy());
    w.u32(a.iterations);
    w.f64(a.energy);
    w.u32(static_cast<std::uint32_t>(a.fields.size()));
    for (const auto& f : a.fields) {
        if (f.values.size() != static_cast<std::size_t>(f.time_count) * g.plane())
            throw FrameIoError("frame field '" + f.name + "' has inconsistent size");
        w.u32(static_cast<std::uint32_t>(f.name.size()));
        w.bytes(f.name.data(), f.name.size());
        w.u32(f.time_count);
        for (double v : f.values) w.f64(v);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FrameIoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(w.buf.data()), static_cast<std::streamsize>(w.buf.size()));
    if (!out) throw FrameIoError("write to '" + path.string() + "' failed");
}

void write_frames(const Solution& solution, const TransportProblem& problem, const std::filesystem::path& path) {
    write_frames(make_frame_archive(solution, problem), path);
}

FrameArchive read_frames(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FrameIoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(buf, path.string());
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) r.fail("not a frame archive (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kFrameFormatVersion) r.fail("unsupported format version " + std::to_string(version));
    FrameArchive a;
    const std::uint32_t nt = r.u32(), nx = r.u32(), ny = r.u32(), bc = r.u32();
    if (bc > 1) r.fail("invalid boundary code");
    const double lx = r.f64(), ly = r.f64();
    r.f64();
    r.f64();
    r.f64();
    try {
        a.grid = GridSpec::make(static_cast<int>(nt), static_cast<int>(nx), static_cast<int>(ny),
                                bc == 0 ? SpaceBc::Periodic : SpaceBc::Neumann, lx, ly);
    } catch (const GridError& e) {
        r.fail(std::string("invalid grid header: ") + e.what());
    }
    a.iterations = r.u32();
    a.energy = r.f64();
    const std::uint32_t count = r.u32();
    const std::size_t plane = a.grid.plane();
    for (std::uint32_t i = 0; i < count; ++i) {
        FrameField f;
        const std::uint32_t len = r.u32();
        if (len > r.remaining()) r.fail("truncated file");
        f.name.resize(len);
        r.bytes(f.name.data(), len);
        f.time_count = r.u32();
        const std::size_t n = static_cast<std::size_t>(f.time_count) * plane;
        if (n > r.remaining() / 8) r.fail("truncated file");
        f.values.resize(n);
        for (std::size_t k = 0; k < n; ++k) f.values[k] = r.f64();
        a.fields.push_back(std::move(f));
    }
    if (r.remaining() != 0) r.fail("trailing bytes after last field");
    return a;
}

}  // namespace cmot
