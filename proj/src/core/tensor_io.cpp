#include "core/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace dgp {
namespace {

constexpr char kMagic[4] = {'D', 'G', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF64 = 0;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::vector<unsigned char>& out, T v)
{
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>)
        bits = std::bit_cast<std::uint64_t>(v);
    else
        bits = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

class Reader {
public:
    explicit Reader(const std::vector<unsigned char>& b) : bytes_(b) {}

    template <typename T>
    T get()
    {
        if (pos_ + sizeof(T) > bytes_.size()) throw Error(ErrorCode::Truncated, "tensor file truncated");
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        if constexpr (std::is_same_v<T, double>)
            return std::bit_cast<double>(bits);
        else
            return static_cast<T>(bits);
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 4;
};

} // namespace

std::uint64_t Tensor::element_count() const
{
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

std::vector<unsigned char> encode_tensor(const Tensor& t)
{
    require(t.dims.size() <= 255, "tensor rank exceeds 255");
    require(t.element_count() == t.data.size(), ErrorCode::ShapeMismatch, "tensor dims do not match payload size");
    std::vector<unsigned char> out(kMagic, kMagic + 4);
    put_le(out, kVersion);
    put_le(out, kDtypeF64);
    put_le(out, static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) put_le(out, d);
    out.reserve(out.size() + 8 * t.data.size());
    for (double v : t.data) put_le(out, v);
    return out;
}

Tensor decode_tensor(const std::vector<unsigned char>& bytes)
{
    if (bytes.size() < 4) throw Error(ErrorCode::Truncated, "tensor file truncated before magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "tensor magic mismatch (expected DGPT)");
    Reader r(bytes);
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion) throw Error(ErrorCode::BadVersion, "unsupported tensor version " + std::to_string(version));
    const auto dtype = r.get<std::uint8_t>();
    if (dtype != kDtypeF64) throw Error(ErrorCode::BadDtype, "unsupported tensor dtype " + std::to_string(dtype));
    const auto ndim = r.get<std::uint8_t>();
    Tensor t;
    t.dims.resize(ndim);
    for (auto& d : t.dims) d = r.get<std::uint64_t>();
    const std::uint64_t n = t.element_count();
    if (r.remaining() / 8 < n) throw Error(ErrorCode::Truncated, "tensor payload truncated");
    if (r.remaining() != n * 8) throw Error(ErrorCode::Truncated, "tensor payload has trailing bytes");
    t.data.resize(n);
    for (auto& v : t.data) v = r.get<double>();
    return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t)
{
    const auto bytes = encode_tensor(t);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_tensor(bytes);
}

Tensor to_tensor(const Field& f)
{
    return Tensor{{static_cast<std::uint64_t>(f.ny()), static_cast<std::uint64_t>(f.nx()),
                   static_cast<std::uint64_t>(f.channels())},
                  f.storage()};
}

Field to_field(const Tensor& t, Boundary boundary)
{
    require(t.dims.size() == 3, ErrorCode::ShapeMismatch, "field tensors must have 3 dims (ny, nx, channels)");
    const Grid g = Grid::make(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]), boundary);
    Field f(g, static_cast<int>(t.dims[2]), t.data);
    f.require_finite("read_field");
    return f;
}

void write_field(const std::filesystem::path& path, const Field& f) { write_tensor(path, to_tensor(f)); }

Field read_field(const std::filesystem::path& path, Boundary boundary) { return to_field(read_tensor(path), boundary); }

} // namespace dgp
