#include "adsl/vm/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adsl/vm/numeric.hpp"

namespace adsl::vm {

using dsl::DType;

namespace {

constexpr std::string_view kMagic = "ADSLT";
constexpr uint16_t kVersion = 1;

uint8_t dtype_tag(DType t) {
    switch (t) {
        case DType::F16: return 0;
        case DType::F32: return 1;
        case DType::I32: return 2;
        case DType::U8: return 3;
    }
    return 255;
}

DType tag_dtype(uint8_t tag) {
    switch (tag) {
        case 0: return DType::F16;
        case 1: return DType::F32;
        case 2: return DType::I32;
        case 3: return DType::U8;
    }
    throw std::runtime_error("tensor container: unknown dtype tag " + std::to_string(tag));
}

void put_le(std::string& out, uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
  public:
    explicit Reader(std::string_view b) : b_(b) {}
    uint64_t le(int bytes) {
        if (pos_ + static_cast<std::size_t>(bytes) > b_.size()) throw std::runtime_error("tensor container: truncated");
        uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(b_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    std::string_view take(std::size_t n) {
        if (pos_ + n > b_.size()) throw std::runtime_error("tensor container: truncated");
        auto s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == b_.size(); }

  private:
    std::string_view b_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_tensor(const TensorValue& t) {
    std::string out(kMagic);
    put_le(out, kVersion, 2);
    put_le(out, dtype_tag(t.dtype), 1);
    put_le(out, t.shape.size(), 1);
    for (auto d : t.shape) put_le(out, static_cast<uint64_t>(d), 8);
    for (double v : t.data) {
        switch (t.dtype) {
            case DType::F16: put_le(out, f16_bits(v), 2); break;
            case DType::F32: put_le(out, std::bit_cast<uint32_t>(static_cast<float>(v)), 4); break;
            case DType::I32: put_le(out, static_cast<uint32_t>(static_cast<int32_t>(v)), 4); break;
            case DType::U8: put_le(out, static_cast<uint8_t>(v), 1); break;
        }
    }
    return out;
}

TensorValue decode_tensor(std::string_view bytes) {
    Reader r(bytes);
    if (r.take(kMagic.size()) != kMagic) throw std::runtime_error("tensor container: bad magic");
    const auto version = r.le(2);
    if (version != kVersion) throw std::runtime_error("tensor container: unsupported version " + std::to_string(version));
    TensorValue t;
    t.dtype = tag_dtype(static_cast<uint8_t>(r.le(1)));
    const auto rank = r.le(1);
    int64_t n = 1;
    for (uint64_t i = 0; i < rank; ++i) {
        const auto d = r.le(8);
        if (d > (uint64_t{1} << 40) || __builtin_mul_overflow(n, static_cast<int64_t>(d), &n) || n > (int64_t{1} << 32))
            throw std::runtime_error("tensor container: dims too large");
        t.shape.push_back(static_cast<int64_t>(d));
    }
    t.data.reserve(static_cast<std::size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        switch (t.dtype) {
            case DType::F16: t.data.push_back(f16_from_bits(static_cast<uint16_t>(r.le(2)))); break;
            case DType::F32: t.data.push_back(std::bit_cast<float>(static_cast<uint32_t>(r.le(4)))); break;
            case DType::I32: t.data.push_back(static_cast<int32_t>(static_cast<uint32_t>(r.le(4)))); break;
            case DType::U8: t.data.push_back(static_cast<double>(r.le(1))); break;
        }
    }
    if (!r.done()) throw std::runtime_error("tensor container: trailing bytes");
    return t;
}

void write_tensor_file(const std::string& path, const TensorValue& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    const std::string bytes = encode_tensor(t);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("cannot write " + path);
}

TensorValue read_tensor_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_tensor(ss.str());
}

}  // namespace adsl::vm
