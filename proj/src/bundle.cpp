#include "fbasis/bundle.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

#include "fbasis/error.hpp"
#include "json.hpp"

namespace fbasis {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorKind::Format, std::string("truncated ") + what + " at offset " +
                                         std::to_string(pos_));
    }
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string text(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string offset_msg(const std::string& what, std::size_t offset) {
  return what + " at offset " + std::to_string(offset);
}

}  // namespace

std::vector<std::uint8_t> encode_bundle(const FrameBundle& bundle) {
  if (bundle.items.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::Format, "too many items for a bundle");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kBundleHeaderSize + 8 * bundle.items.size() * bundle.rows * bundle.cols);
  for (char c : {'F', 'R', 'M', 'B'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, kBundleVersion);
  out.push_back(static_cast<std::uint8_t>(bundle.kind));
  put_u32(out, bundle.rows);
  put_u32(out, bundle.cols);
  put_u32(out, static_cast<std::uint32_t>(bundle.items.size()));
  for (std::size_t i = 0; i < bundle.items.size(); ++i) {
    const Matrix& m = bundle.items[i];
    if (m.rows() != bundle.rows || m.cols() != bundle.cols) {
      throw Error(ErrorKind::DimensionMismatch, "item shape differs from bundle header", i);
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
    }
  }
  if (bundle.metadata) {
    if (bundle.metadata->size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorKind::Format, "metadata block too large");
    }
    put_u32(out, static_cast<std::uint32_t>(bundle.metadata->size()));
    out.insert(out.end(), bundle.metadata->begin(), bundle.metadata->end());
  }
  return out;
}

FrameBundle decode_bundle(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.need(4, "magic");
  if (in.text(4) != "FRMB") throw Error(ErrorKind::Format, offset_msg("bad magic", 0));
  const std::uint32_t version = in.u32("version");
  if (version != kBundleVersion) {
    throw Error(ErrorKind::Format, offset_msg("unsupported version " + std::to_string(version), 4));
  }
  FrameBundle bundle;
  const std::uint8_t kind = in.u8("kind");
  if (kind > 2) throw Error(ErrorKind::Format, offset_msg("unknown kind " + std::to_string(kind), 8));
  bundle.kind = static_cast<BundleKind>(kind);
  bundle.rows = in.u32("rows");
  bundle.cols = in.u32("cols");
  const std::uint32_t count = in.u32("count");
  if (count > 0 && (bundle.rows == 0 || bundle.cols == 0)) {
    throw Error(ErrorKind::Format, offset_msg("zero item dimension", 9));
  }

  const std::size_t per_item = static_cast<std::size_t>(bundle.rows) * bundle.cols;
  const std::size_t payload = 8 * per_item * count;
  if (count != 0 && payload / count / 8 != per_item) {
    throw Error(ErrorKind::Format, offset_msg("header sizes overflow", 9));
  }
  in.need(payload, "payload");
  bundle.items.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t start = in.offset();
    Matrix m(bundle.rows, bundle.cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.f64();
    }
    if (!m.allFinite()) {
      throw Error(ErrorKind::Format, offset_msg("non-finite value in item " + std::to_string(i), start));
    }
    if (bundle.kind == BundleKind::Frames) {
      if (bundle.cols > bundle.rows || orthonormality_error(m) > kBundleFrameTol) {
        throw Error(ErrorKind::Format,
                    offset_msg("frame item " + std::to_string(i) + " is not orthonormal", start));
      }
    }
    bundle.items.push_back(std::move(m));
  }

  if (in.remaining() > 0) {
    const std::size_t at = in.offset();
    const std::uint32_t len = in.u32("metadata length");
    if (in.remaining() != len) {
      throw Error(ErrorKind::Format,
                  offset_msg("metadata length " + std::to_string(len) + " does not match the " +
                                 std::to_string(in.remaining()) + " trailing bytes",
                             at));
    }
    bundle.metadata = in.text(len);
    if (!bundle.metadata->empty() && !nlohmann::json::accept(*bundle.metadata)) {
      throw Error(ErrorKind::Format, offset_msg("metadata is not valid JSON", at + 4));
    }
  }
  return bundle;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

FrameBundle read_bundle(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_bundle(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message(), e.sample_index());
  }
}

void write_bundle(const std::filesystem::path& path, const FrameBundle& bundle) {
  write_file_bytes(path, encode_bundle(bundle));
}

FrameBundle make_bundle(BundleKind kind, std::vector<Matrix> items,
                        std::optional<std::string> metadata) {
  FrameBundle b;
  b.kind = kind;
  if (!items.empty()) {
    b.rows = static_cast<std::uint32_t>(items.front().rows());
    b.cols = static_cast<std::uint32_t>(items.front().cols());
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].rows() != b.rows || items[i].cols() != b.cols) {
      throw Error(ErrorKind::DimensionMismatch, "item shape differs from the first item", i);
    }
  }
  b.items = std::move(items);
  b.metadata = std::move(metadata);
  return b;
}

FrameBundle make_frame_bundle(std::span<const Frame> frames, std::optional<std::string> metadata) {
  std::vector<Matrix> items;
  items.reserve(frames.size());
  for (const Frame& f : frames) items.push_back(f.matrix());
  return make_bundle(BundleKind::Frames, std::move(items), std::move(metadata));
}

std::vector<Frame> bundle_frames(const FrameBundle& bundle) {
  if (bundle.kind != BundleKind::Frames) throw Error(ErrorKind::Format, "bundle does not hold frames");
  std::vector<Frame> out;
  out.reserve(bundle.items.size());
  for (const Matrix& m : bundle.items) {
    if (orthonormality_error(m) <= kFrameTol) {
      out.emplace_back(m);
    } else {
      // Accepted at the looser file tolerance; snap to the nearest frame.
      const Svd svd = thin_svd(m);
      out.emplace_back(svd.u * svd.v.transpose());
    }
  }
  return out;
}

}  // namespace fbasis
