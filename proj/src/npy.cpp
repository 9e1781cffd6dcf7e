#include "upm/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <vector>

namespace upm {

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";

template <typename T>
T byteswap_value(T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  std::reverse(std::begin(bytes), std::end(bytes));
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

std::uint32_t read_le(std::string_view bytes, std::size_t offset, std::size_t width) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

// Minimal parser for the python-literal header dict numpy writes.
class HeaderParser {
 public:
  HeaderParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  struct Fields {
    std::string descr;
    bool fortran_order = false;
    std::vector<std::size_t> shape;
  };

  Fields parse() {
    Fields f;
    bool have_descr = false, have_order = false, have_shape = false;
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        f.descr = parse_string();
        have_descr = true;
      } else if (key == "fortran_order") {
        f.fortran_order = parse_bool();
        have_order = true;
      } else if (key == "shape") {
        f.shape = parse_shape();
        have_shape = true;
      } else {
        fail("unknown header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    if (!have_descr || !have_order || !have_shape) {
      fail("header is missing descr, fortran_order or shape");
    }
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw NpyError(ErrorCode::MalformedHeader, base_ + pos_, msg);
  }

  char peek() const {
    if (pos_ >= text_.size()) fail("unexpected end of header");
    return text_[pos_];
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail("expected quoted string");
    ++pos_;
    const std::size_t start = pos_;
    while (peek() != quote) ++pos_;
    std::string s(text_.substr(start, pos_ - start));
    ++pos_;
    return s;
  }

  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }

  std::vector<std::size_t> parse_shape() {
    std::vector<std::size_t> dims;
    expect('(');
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        break;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected dimension");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        v = v * 10 + static_cast<std::size_t>(peek() - '0');
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
    return dims;
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

}  // namespace

Tensor parse_tensor(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw NpyError(ErrorCode::MalformedHeader, 0, "missing NPY magic");
  }
  if (bytes.size() < 8) {
    throw NpyError(ErrorCode::MalformedHeader, bytes.size(), "missing version bytes");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if ((major != 1 && major != 2) || minor != 0) {
    throw NpyError(ErrorCode::MalformedHeader, 6,
                   "unsupported NPY version " + std::to_string(major) + "." +
                       std::to_string(minor));
  }
  const std::size_t len_width = major == 1 ? 2 : 4;
  if (bytes.size() < 8 + len_width) {
    throw NpyError(ErrorCode::MalformedHeader, bytes.size(), "missing header length");
  }
  const std::size_t header_len = read_le(bytes, 8, len_width);
  const std::size_t header_start = 8 + len_width;
  if (bytes.size() < header_start + header_len) {
    throw NpyError(ErrorCode::MalformedHeader, bytes.size(), "header extends past end of file");
  }

  const auto fields =
      HeaderParser(bytes.substr(header_start, header_len), header_start).parse();
  if (fields.fortran_order) {
    throw NpyError(ErrorCode::MalformedHeader, header_start, "fortran_order arrays unsupported");
  }
  if (fields.shape.empty() || fields.shape.size() > 3) {
    throw NpyError(ErrorCode::MalformedHeader, header_start,
                   "rank must be 1-3, got " + std::to_string(fields.shape.size()));
  }
  if (std::any_of(fields.shape.begin(), fields.shape.end(), [](auto d) { return d == 0; })) {
    throw NpyError(ErrorCode::MalformedHeader, header_start, "zero extent in shape");
  }

  const std::string& descr = fields.descr;
  std::size_t item = 0;
  bool big_endian = false;
  if (descr.size() == 3 && descr[1] == 'f' && (descr[2] == '4' || descr[2] == '8') &&
      (descr[0] == '<' || descr[0] == '>' || descr[0] == '=' || descr[0] == '|')) {
    item = descr[2] == '4' ? 4 : 8;
    big_endian = descr[0] == '>' || (descr[0] == '=' && std::endian::native == std::endian::big);
  } else {
    throw NpyError(ErrorCode::UnsupportedElementType, header_start,
                   "element type '" + descr + "' is not float32/float64");
  }
  const bool swap = big_endian != (std::endian::native == std::endian::big);

  std::size_t count = 1;
  for (auto d : fields.shape) count *= d;
  const std::size_t payload_start = header_start + header_len;
  const std::size_t available = bytes.size() - payload_start;
  if (available < count * item) {
    throw NpyError(ErrorCode::TruncatedPayload, bytes.size(),
                   "payload holds " + std::to_string(available) + " of " +
                       std::to_string(count * item) + " bytes");
  }

  std::vector<float> data(count);
  const char* src = bytes.data() + payload_start;
  if (item == 4) {
    for (std::size_t i = 0; i < count; ++i) {
      float v;
      std::memcpy(&v, src + i * 4, 4);
      data[i] = swap ? byteswap_value(v) : v;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      double v;
      std::memcpy(&v, src + i * 8, 8);
      data[i] = static_cast<float>(swap ? byteswap_value(v) : v);
    }
  }
  return Tensor(fields.shape, std::move(data));
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_tensor(bytes);
}

std::string serialize_tensor(const Tensor& t) {
  std::ostringstream header;
  header << "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < t.rank(); ++i) {
    header << t.dims()[i];
    if (t.rank() == 1 || i + 1 < t.rank()) header << ",";
    if (i + 1 < t.rank()) header << " ";
  }
  header << "), }";
  std::string text = header.str();
  // Pad with spaces so the payload starts on a 64-byte boundary.
  const std::size_t unpadded = 10 + text.size() + 1;
  text.append((64 - unpadded % 64) % 64, ' ');
  text.push_back('\n');

  std::string out(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(text.size() & 0xff));
  out.push_back(static_cast<char>((text.size() >> 8) & 0xff));
  out += text;

  const std::size_t payload_start = out.size();
  out.resize(payload_start + t.size() * 4);
  auto data = t.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    float v = data[i];
    if constexpr (std::endian::native == std::endian::big) v = byteswap_value(v);
    std::memcpy(out.data() + payload_start + i * 4, &v, 4);
  }
  return out;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  const std::string bytes = serialize_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
  }
}

}  // namespace upm
