#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "tubal/error.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/**
 * Binary tensor file ("TNS1").
 *
 *   offset 0   4 bytes  magic "TNS1"
 *   offset 4   u32 LE   n1
 *   offset 8   u32 LE   n2
 *   offset 12  u32 LE   n3
 *   offset 16  u8       payload type: 0 = float64, 1 = uint8 mask
 *   offset 17  payload  n1*n2*n3 values, i fastest, then j, then k;
 *                       float64 as IEEE-754 binary64 little-endian
 */
enum class PayloadType : std::uint8_t { float64 = 0, mask = 1 };

struct TensorFileHeader {
  static constexpr std::size_t kSize = 17;
  static constexpr std::array<char, 4> kMagic{'T', 'N', 'S', '1'};

  Dims dims;
  PayloadType payload = PayloadType::float64;

  [[nodiscard]] std::size_t value_bytes() const { return payload == PayloadType::float64 ? 8 : 1; }
};

using Bytes = std::vector<std::uint8_t>;

namespace detail {

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void encode_header(Bytes& out, const TensorFileHeader& h) {
  auto narrow = [](std::size_t n) {
    require(n <= std::numeric_limits<std::uint32_t>::max(), "tensor extent exceeds 32 bits");
    return static_cast<std::uint32_t>(n);
  };
  out.insert(out.end(), TensorFileHeader::kMagic.begin(), TensorFileHeader::kMagic.end());
  put_u32(out, narrow(h.dims.n1));
  put_u32(out, narrow(h.dims.n2));
  put_u32(out, narrow(h.dims.n3));
  out.push_back(static_cast<std::uint8_t>(h.payload));
}

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

}  // namespace detail

inline TensorFileHeader decode_header(const Bytes& bytes) {
  if (bytes.size() < TensorFileHeader::kSize) throw FormatError("tensor file shorter than its header");
  if (!std::equal(TensorFileHeader::kMagic.begin(), TensorFileHeader::kMagic.end(), bytes.begin())) {
    throw FormatError("bad magic: not a TNS1 tensor file");
  }
  TensorFileHeader h;
  h.dims = Dims{detail::get_u32(&bytes[4]), detail::get_u32(&bytes[8]), detail::get_u32(&bytes[12])};
  if (!h.dims.valid()) throw FormatError("tensor file dims must be >= 1");
  const std::uint8_t tag = bytes[16];
  if (tag > 1) throw FormatError("unknown payload type " + std::to_string(tag));
  h.payload = static_cast<PayloadType>(tag);

  // Overflow-checked payload size.
  std::size_t count = h.dims.n1;
  for (std::size_t f : {h.dims.n2, h.dims.n3, h.value_bytes()}) {
    if (count > std::numeric_limits<std::size_t>::max() / f) throw FormatError("tensor dims overflow");
    count *= f;
  }
  if (bytes.size() - TensorFileHeader::kSize < count) throw FormatError("truncated tensor payload");
  if (bytes.size() - TensorFileHeader::kSize > count) throw FormatError("trailing bytes after tensor payload");
  return h;
}

inline Bytes encode_tensor(const Tensor3& t) {
  Bytes out;
  out.reserve(TensorFileHeader::kSize + 8 * t.size());
  detail::encode_header(out, {t.dims(), PayloadType::float64});
  for (double v : t.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(bits >> s));
  }
  return out;
}

inline Bytes encode_mask(const ObservationMask& m) {
  Bytes out;
  out.reserve(TensorFileHeader::kSize + m.size());
  detail::encode_header(out, {m.dims(), PayloadType::mask});
  out.insert(out.end(), m.values().begin(), m.values().end());
  return out;
}

using TensorFileContent = std::variant<Tensor3, ObservationMask>;

inline TensorFileContent decode_tensor_file(const Bytes& bytes) {
  const auto h = decode_header(bytes);
  const std::uint8_t* payload = bytes.data() + TensorFileHeader::kSize;
  const std::size_t n = h.dims.size();
  if (h.payload == PayloadType::mask) {
    std::vector<std::uint8_t> bits(payload, payload + n);
    for (auto b : bits) {
      if (b > 1) throw FormatError("mask payload entries must be 0 or 1");
    }
    return ObservationMask(h.dims, std::move(bits));
  }
  std::vector<double> values(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | payload[8 * idx + static_cast<std::size_t>(b)];
    values[idx] = std::bit_cast<double>(bits);
    if (!std::isfinite(values[idx])) throw FormatError("tensor payload contains non-finite values");
  }
  return Tensor3(h.dims, std::move(values));
}

inline void write_tensor(const std::filesystem::path& path, const Tensor3& t) {
  detail::write_file(path, encode_tensor(t));
}

inline void write_mask(const std::filesystem::path& path, const ObservationMask& m) {
  detail::write_file(path, encode_mask(m));
}

inline TensorFileContent read_tensor_file(const std::filesystem::path& path) {
  return decode_tensor_file(detail::read_file(path));
}

/// Reads a float64 tensor file. A mask file is accepted and converted to 0/1.
inline Tensor3 read_tensor(const std::filesystem::path& path) {
  auto content = read_tensor_file(path);
  if (auto* mask = std::get_if<ObservationMask>(&content)) return mask->to_tensor();
  return std::get<Tensor3>(std::move(content));
}

/// Reads a mask file, or a float64 tensor file holding only zeros and ones.
inline ObservationMask read_mask(const std::filesystem::path& path) {
  auto content = read_tensor_file(path);
  if (auto* t = std::get_if<Tensor3>(&content)) return ObservationMask::from_tensor(*t);
  return std::get<ObservationMask>(std::move(content));
}

// ---------------------------------------------------------------------------
// Netpbm images. P5 (grey) becomes n1 x n2 x 1, P6 (RGB) n1 x n2 x 3 with one
// frontal slice per channel; rows map to i, columns to j, values to
// sample / maxval.

namespace detail {

class PnmCursor {
 public:
  explicit PnmCursor(const Bytes& b) : b_(b) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_]) != 0) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || std::isdigit(b_[pos_]) == 0) throw FormatError("malformed PNM header");
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_]) != 0) {
      v = v * 10 + static_cast<std::size_t>(b_[pos_] - '0');
      if (v > (std::size_t{1} << 31)) throw FormatError("PNM header value too large");
      ++pos_;
    }
    return v;
  }

  std::size_t& pos() { return pos_; }

 private:
  const Bytes& b_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Tensor3 decode_pnm(const Bytes& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError("unsupported image format (binary PGM P5 or PPM P6 expected)");
  }
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  detail::PnmCursor cur(bytes);
  cur.pos() = 2;
  const std::size_t width = cur.number();
  const std::size_t height = cur.number();
  const std::size_t maxval = cur.number();
  if (width == 0 || height == 0) throw FormatError("PNM image has zero extent");
  if (maxval == 0 || maxval > 65535) throw FormatError("PNM maxval must lie in [1, 65535]");
  if (cur.pos() >= bytes.size() || std::isspace(bytes[cur.pos()]) == 0) {
    throw FormatError("malformed PNM header");
  }
  ++cur.pos();
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t needed = width * height * channels * sample_bytes;
  if (bytes.size() - cur.pos() < needed) throw FormatError("truncated PNM raster");

  Tensor3 t(Dims{height, width, channels});
  const std::uint8_t* p = bytes.data() + cur.pos();
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t ch = 0; ch < channels; ++ch) {
        std::size_t v = *p++;
        if (sample_bytes == 2) v = (v << 8) | *p++;
        if (v > maxval) throw FormatError("PNM sample exceeds maxval");
        t(r, c, ch) = static_cast<double>(v) * scale;
      }
    }
  }
  return t;
}

inline Tensor3 image_to_tensor(const std::filesystem::path& path) {
  return decode_pnm(detail::read_file(path));
}

/// Writes a 1-slice tensor as P5 or a 3-slice tensor as P6, clamping to [0,1]
/// and rounding to the nearest level of maxval.
inline Bytes encode_pnm(const Tensor3& t, std::size_t maxval = 255) {
  const Dims d = t.dims();
  detail::require(d.n3 == 1 || d.n3 == 3, "only 1- or 3-slice tensors can be written as images");
  detail::require(maxval >= 1 && maxval <= 65535, "maxval must lie in [1, 65535]");
  const std::string header = std::string(d.n3 == 1 ? "P5" : "P6") + "\n" + std::to_string(d.n2) + " " +
                             std::to_string(d.n1) + "\n" + std::to_string(maxval) + "\n";
  Bytes out(header.begin(), header.end());
  for (std::size_t r = 0; r < d.n1; ++r) {
    for (std::size_t c = 0; c < d.n2; ++c) {
      for (std::size_t ch = 0; ch < d.n3; ++ch) {
        const double v = std::clamp(t(r, c, ch), 0.0, 1.0);
        const auto level = static_cast<std::size_t>(std::lround(v * static_cast<double>(maxval)));
        if (maxval > 255) out.push_back(static_cast<std::uint8_t>(level >> 8));
        out.push_back(static_cast<std::uint8_t>(level & 0xff));
      }
    }
  }
  return out;
}

inline void tensor_to_image(const std::filesystem::path& path, const Tensor3& t, std::size_t maxval = 255) {
  detail::write_file(path, encode_pnm(t, maxval));
}

/// Loads a TNS1 tensor or a P5/P6 image, chosen by the file's leading bytes.
inline Tensor3 load_tensor_any(const std::filesystem::path& path) {
  const Bytes bytes = detail::read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return decode_pnm(bytes);
  auto content = decode_tensor_file(bytes);
  if (auto* mask = std::get_if<ObservationMask>(&content)) return mask->to_tensor();
  return std::get<Tensor3>(std::move(content));
}

}  // namespace tubal
