#include "vcd/media_io.hpp"

#include <glob.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vcd/error.hpp"

namespace vcd {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 26;

struct Y4mHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  std::int64_t fps_num = 0;
  std::int64_t fps_den = 0;
  std::string colorspace = "420jpeg";
};

std::string read_line(std::istream& in, std::size_t limit, const char* what) {
  std::string line;
  char c;
  while (in.get(c)) {
    if (c == '\n') return line;
    line.push_back(c);
    if (line.size() > limit) throw Error(ErrorCode::kParseError, std::string(what) + " line too long");
  }
  if (line.empty()) return {};
  throw Error(ErrorCode::kTruncatedStream, std::string(what) + " line not terminated");
}

std::int64_t parse_positive(const std::string& token, std::size_t pos, const char* what) {
  const std::string digits = token.substr(pos);
  if (digits.empty() || digits.size() > 9 ||
      !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorCode::kParseError, std::string("bad ") + what + " token '" + token + "'");
  }
  const std::int64_t v = std::stoll(digits);
  if (v <= 0) throw Error(ErrorCode::kParseError, std::string(what) + " must be positive");
  return v;
}

Y4mHeader parse_y4m_header(const std::string& line) {
  std::istringstream tokens(line);
  std::string tok;
  tokens >> tok;
  if (tok != "YUV4MPEG2") throw Error(ErrorCode::kParseError, "missing YUV4MPEG2 signature");
  Y4mHeader h;
  while (tokens >> tok) {
    switch (tok[0]) {
      case 'W': h.width = static_cast<std::size_t>(parse_positive(tok, 1, "width")); break;
      case 'H': h.height = static_cast<std::size_t>(parse_positive(tok, 1, "height")); break;
      case 'F': {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::kParseError, "bad rate token '" + tok + "'");
        h.fps_num = parse_positive(tok.substr(0, colon), 1, "rate");
        h.fps_den = parse_positive(tok.substr(colon + 1), 0, "rate");
        break;
      }
      case 'C': h.colorspace = tok.substr(1); break;
      case 'I':  // interlacing and aspect are parsed but frames stay progressive rasters
      case 'A':
      case 'X': break;
      default: throw Error(ErrorCode::kParseError, "unknown header token '" + tok + "'");
    }
  }
  if (h.width == 0 || h.height == 0) throw Error(ErrorCode::kParseError, "header lacks W/H");
  if (h.fps_num == 0) throw Error(ErrorCode::kParseError, "header lacks frame rate");
  if (h.width * h.height > kMaxPixels) throw Error(ErrorCode::kUnsupportedFormat, "frame too large");
  return h;
}

std::size_t chroma_bytes(const Y4mHeader& h) {
  const std::size_t cw = (h.width + 1) / 2;
  const std::size_t ch = (h.height + 1) / 2;
  const auto& cs = h.colorspace;
  if (cs == "mono") return 0;
  if (cs == "420" || cs == "420jpeg" || cs == "420paldv" || cs == "420mpeg2") return 2 * cw * ch;
  if (cs == "422") return 2 * cw * h.height;
  if (cs == "444") return 2 * h.width * h.height;
  throw Error(ErrorCode::kUnsupportedFormat, "colorspace '" + cs + "'");
}

void read_exact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorCode::kTruncatedStream, "frame payload ends early");
  }
}

// PGM header tokens are separated by whitespace and may be interleaved with
// '#' comments running to end of line.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
    if (tok.size() > 16) throw Error(ErrorCode::kParseError, "PGM header token too long");
  }
  if (tok.empty()) throw Error(ErrorCode::kParseError, "PGM header ends early");
  return tok;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

}  // namespace

Video read_y4m(std::istream& in) {
  const std::string header_line = read_line(in, 4096, "header");
  if (header_line.empty()) throw Error(ErrorCode::kParseError, "empty stream");
  const Y4mHeader h = parse_y4m_header(header_line);
  const std::size_t luma = h.width * h.height;
  const std::size_t skip = chroma_bytes(h);

  std::vector<GrayFrame> frames;
  std::vector<char> luma_buf(luma);
  std::vector<char> skip_buf(skip);
  while (true) {
    const std::string marker = read_line(in, 4096, "FRAME");
    if (marker.empty()) {
      if (in.eof()) break;
      throw Error(ErrorCode::kParseError, "empty frame marker");
    }
    if (marker.rfind("FRAME", 0) != 0) throw Error(ErrorCode::kParseError, "expected FRAME marker");
    read_exact(in, luma_buf.data(), luma);
    if (skip > 0) read_exact(in, skip_buf.data(), skip);
    std::vector<Pixel> px(luma);
    for (std::size_t i = 0; i < luma; ++i) {
      px[i] = static_cast<Pixel>(static_cast<unsigned char>(luma_buf[i])) / 255.0;
    }
    frames.emplace_back(h.width, h.height, std::move(px));
  }
  if (frames.empty()) throw Error(ErrorCode::kParseError, "stream has no frames");
  return Video(Fps(h.fps_num, h.fps_den), std::move(frames));
}

Video read_y4m(const fs::path& path) {
  auto in = open_in(path);
  return read_y4m(in);
}

void write_y4m(const Video& video, std::ostream& out) {
  out << "YUV4MPEG2 W" << video.width() << " H" << video.height() << " F" << video.fps().num() << ':'
      << video.fps().den() << " Cmono\n";
  std::vector<char> buf(video.width() * video.height());
  for (const auto& frame : video.frames()) {
    auto px = frame.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) buf[i] = static_cast<char>(quantize8(px[i]));
    out << "FRAME\n";
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

void write_y4m(const Video& video, const fs::path& path) {
  auto out = open_out(path);
  write_y4m(video, out);
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "cannot finish writing " + path.string());
}

GrayFrame read_pgm(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P5") throw Error(ErrorCode::kParseError, "not a binary PGM (magic '" + magic + "')");
  auto number = [&](const char* what) {
    const std::string t = pgm_token(in);
    return parse_positive(t, 0, what);
  };
  const auto width = static_cast<std::size_t>(number("width"));
  const auto height = static_cast<std::size_t>(number("height"));
  const auto maxval = number("maxval");
  if (maxval > 65535) throw Error(ErrorCode::kUnsupportedFormat, "PGM maxval above 65535");
  if (width * height > kMaxPixels) throw Error(ErrorCode::kUnsupportedFormat, "frame too large");

  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<char> raw(width * height * bytes_per);
  read_exact(in, raw.data(), raw.size());
  std::vector<Pixel> px(width * height);
  const Pixel scale = static_cast<Pixel>(maxval);
  for (std::size_t i = 0; i < px.size(); ++i) {
    unsigned v;
    if (bytes_per == 1) {
      v = static_cast<unsigned char>(raw[i]);
    } else {
      v = (static_cast<unsigned>(static_cast<unsigned char>(raw[2 * i])) << 8) |
          static_cast<unsigned char>(raw[2 * i + 1]);
    }
    if (v > static_cast<unsigned>(maxval)) throw Error(ErrorCode::kParseError, "PGM sample above maxval");
    px[i] = static_cast<Pixel>(v) / scale;
  }
  return GrayFrame(width, height, std::move(px));
}

Video read_pgm_sequence(std::span<const fs::path> files, Fps fps) {
  if (files.empty()) throw Error(ErrorCode::kParseError, "empty input: no PGM files given");
  std::vector<GrayFrame> frames;
  frames.reserve(files.size());
  for (const auto& path : files) {
    auto in = open_in(path);
    frames.push_back(read_pgm(in));
  }
  return Video(fps, std::move(frames));
}

void write_pgm(const GrayFrame& frame, std::ostream& out) {
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  std::vector<char> buf(frame.size());
  auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) buf[i] = static_cast<char>(quantize8(px[i]));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

std::vector<fs::path> write_pgm_sequence(const Video& video, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + directory.string() + ": " + ec.message());
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < video.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", i);
    files.push_back(directory / name);
    auto out = open_out(files.back());
    write_pgm(video[i], out);
  }
  return files;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<fs::path> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw Error(ErrorCode::kIoError, "glob failed for '" + pattern + "'");
  std::sort(out.begin(), out.end());
  return out;
}

Video read_video(const std::string& source, Fps pgm_fps) {
  const fs::path path(source);
  const auto ext = path.extension().string();
  if (source.find_first_of("*?[") != std::string::npos) {
    const auto files = expand_glob(source);
    return read_pgm_sequence(files, pgm_fps);
  }
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.path().extension() == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return read_pgm_sequence(files, pgm_fps);
  }
  if (ext == ".y4m") return read_y4m(path);
  if (ext == ".pgm") {
    const fs::path one[] = {path};
    return read_pgm_sequence(one, pgm_fps);
  }
  if (ext == ".txt" || ext == ".lst") {
    auto in = open_in(path);
    std::vector<fs::path> files;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      fs::path p(line);
      files.push_back(p.is_relative() ? path.parent_path() / p : p);
    }
    return read_pgm_sequence(files, pgm_fps);
  }
  throw Error(ErrorCode::kUnsupportedFormat, "cannot infer video format of '" + source + "'");
}

}  // namespace vcd
