#include "s5eval/wav.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "s5eval/errors.hpp"

namespace s5eval {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void fail(const std::filesystem::path& path,
                       const std::string& why) {
  throw AudioError(path.string() + ": " + why);
}

struct Reader {
  std::ifstream in;
  const std::filesystem::path& path;

  void read_bytes(void* dst, std::size_t n, const char* what) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      fail(path, std::string("truncated while reading ") + what);
    }
  }

  std::uint32_t read_u32(const char* what) {
    std::array<unsigned char, 4> b{};
    read_bytes(b.data(), b.size(), what);
    return static_cast<std::uint32_t>(b[0]) |
           static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 |
           static_cast<std::uint32_t>(b[3]) << 24;
  }

  std::uint16_t read_u16(const char* what) {
    std::array<unsigned char, 2> b{};
    read_bytes(b.data(), b.size(), what);
    return static_cast<std::uint16_t>(b[0] | b[1] << 8);
  }

  std::string read_tag() {
    std::array<char, 4> b{};
    read_bytes(b.data(), b.size(), "chunk tag");
    return std::string(b.data(), b.size());
  }

  void skip(std::uint32_t n) {
    in.seekg(n, std::ios::cur);
    if (!in) fail(path, "truncated chunk");
  }
};

struct ParsedHeader {
  WavInfo info;
  std::uint16_t bits = 0;
  std::uint64_t data_bytes = 0;  // stream is positioned at the data payload
};

// Walks the RIFF chunks up to the start of the data payload. Chunk order is
// not assumed beyond fmt appearing before data.
ParsedHeader parse_header(Reader& r) {
  if (r.read_tag() != "RIFF") fail(r.path, "not a RIFF file");
  r.read_u32("RIFF size");
  if (r.read_tag() != "WAVE") fail(r.path, "not a WAVE file");

  ParsedHeader h;
  bool have_fmt = false;
  std::uint16_t format = 0;
  while (true) {
    std::string tag = r.read_tag();
    std::uint32_t size = r.read_u32("chunk size");
    if (tag == "fmt ") {
      if (size < 16) fail(r.path, "fmt chunk too small");
      format = r.read_u16("format tag");
      h.info.channels = r.read_u16("channel count");
      h.info.sample_rate = static_cast<int>(r.read_u32("sample rate"));
      r.read_u32("byte rate");
      r.read_u16("block align");
      h.bits = r.read_u16("bits per sample");
      std::uint32_t consumed = 16;
      if (format == kFormatExtensible) {
        if (size < 40) fail(r.path, "extensible fmt chunk too small");
        r.read_u16("extension size");
        r.read_u16("valid bits");
        r.read_u32("channel mask");
        format = r.read_u16("subformat tag");
        std::array<unsigned char, 14> guid_rest{};
        r.read_bytes(guid_rest.data(), guid_rest.size(), "subformat GUID");
        consumed = 40;
      }
      r.skip(size - consumed + (size % 2));
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) fail(r.path, "data chunk precedes fmt chunk");
      h.data_bytes = size;
      break;
    } else {
      r.skip(size + (size % 2));
    }
  }

  if (h.info.channels <= 0) fail(r.path, "channel count is zero");
  if (h.info.sample_rate <= 0) fail(r.path, "sample rate is zero");
  if (format == kFormatFloat && h.bits == 32) {
    h.info.encoding = WavEncoding::Float32;
  } else if (format == kFormatPcm && h.bits == 16) {
    h.info.encoding = WavEncoding::Pcm16;
  } else if (format == kFormatPcm && h.bits == 24) {
    h.info.encoding = WavEncoding::Pcm24;
  } else {
    fail(r.path, "unsupported encoding (format " + std::to_string(format) +
                     ", " + std::to_string(h.bits) + " bits)");
  }

  const std::uint64_t frame_bytes =
      static_cast<std::uint64_t>(h.info.channels) * (h.bits / 8);
  if (h.data_bytes % frame_bytes != 0) {
    fail(r.path, "data size is not a whole number of frames");
  }
  h.info.frames = h.data_bytes / frame_bytes;
  return h;
}

Reader open_reader(const std::filesystem::path& path) {
  Reader r{std::ifstream(path, std::ios::binary), path};
  if (!r.in) fail(path, "cannot open file");
  return r;
}

void append_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<unsigned char>((v >> shift) & 0xFF));
  }
}

void append_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

WavInfo wav_info(const std::filesystem::path& path) {
  Reader r = open_reader(path);
  return parse_header(r).info;
}

MultichannelWaveform read_wav(const std::filesystem::path& path) {
  Reader r = open_reader(path);
  ParsedHeader h = parse_header(r);
  if (h.info.frames == 0) fail(path, "file holds no samples");

  std::vector<unsigned char> payload(h.data_bytes);
  r.read_bytes(payload.data(), payload.size(), "sample data");

  MultichannelWaveform wave = MultichannelWaveform::zeros(
      h.info.channels, h.info.frames, h.info.sample_rate);
  const unsigned char* p = payload.data();
  for (std::uint64_t frame = 0; frame < h.info.frames; ++frame) {
    for (int ch = 0; ch < h.info.channels; ++ch) {
      double value = 0.0;
      switch (h.info.encoding) {
        case WavEncoding::Float32: {
          std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                            static_cast<std::uint32_t>(p[1]) << 8 |
                            static_cast<std::uint32_t>(p[2]) << 16 |
                            static_cast<std::uint32_t>(p[3]) << 24;
          value = static_cast<double>(std::bit_cast<float>(u));
          p += 4;
          break;
        }
        case WavEncoding::Pcm16: {
          auto s = static_cast<std::int16_t>(p[0] | p[1] << 8);
          value = static_cast<double>(s) / 32768.0;
          p += 2;
          break;
        }
        case WavEncoding::Pcm24: {
          std::int32_t s = p[0] | p[1] << 8 | p[2] << 16;
          if (s & 0x800000) s -= 0x1000000;
          value = static_cast<double>(s) / 8388608.0;
          p += 3;
          break;
        }
      }
      wave.channels[ch].samples[frame] = value;
    }
  }
  return wave;
}

void write_wav(const std::filesystem::path& path,
               const MultichannelWaveform& wave, WavEncoding encoding) {
  require_valid(wave, "write_wav");
  require_finite(wave, "write_wav");
  const int channels = static_cast<int>(wave.channel_count());
  const std::size_t frames = wave.frame_count();
  const int bytes_per_sample = encoding == WavEncoding::Float32 ? 4
                               : encoding == WavEncoding::Pcm16 ? 2
                                                                : 3;
  const std::uint16_t format =
      encoding == WavEncoding::Float32 ? kFormatFloat : kFormatPcm;
  const std::uint64_t data_bytes =
      static_cast<std::uint64_t>(frames) * channels * bytes_per_sample;
  if (data_bytes > 0xFFFFFFFFu - 36) {
    throw AudioError(path.string() + ": payload exceeds the RIFF size limit");
  }

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  append_tag(out, "RIFF");
  append_u32(out, static_cast<std::uint32_t>(36 + data_bytes));
  append_tag(out, "WAVE");
  append_tag(out, "fmt ");
  append_u32(out, 16);
  append_u16(out, format);
  append_u16(out, static_cast<std::uint16_t>(channels));
  append_u32(out, static_cast<std::uint32_t>(wave.sample_rate()));
  append_u32(out, static_cast<std::uint32_t>(wave.sample_rate() * channels *
                                             bytes_per_sample));
  append_u16(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  append_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  append_tag(out, "data");
  append_u32(out, static_cast<std::uint32_t>(data_bytes));

  for (std::size_t frame = 0; frame < frames; ++frame) {
    for (int ch = 0; ch < channels; ++ch) {
      const double x = wave.channels[ch].samples[frame];
      switch (encoding) {
        case WavEncoding::Float32: {
          append_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
          break;
        }
        case WavEncoding::Pcm16: {
          if (x < -1.0 || x > 1.0) {
            fail(path, "sample out of [-1, 1]; refusing to clip");
          }
          auto q = static_cast<std::int32_t>(std::lround(x * 32768.0));
          q = std::min(q, 32767);
          append_u16(out, static_cast<std::uint16_t>(
                              static_cast<std::int16_t>(q)));
          break;
        }
        case WavEncoding::Pcm24: {
          if (x < -1.0 || x > 1.0) {
            fail(path, "sample out of [-1, 1]; refusing to clip");
          }
          auto q = static_cast<std::int32_t>(std::lround(x * 8388608.0));
          q = std::min(q, 8388607);
          const auto u = static_cast<std::uint32_t>(q);
          out.push_back(static_cast<unsigned char>(u & 0xFF));
          out.push_back(static_cast<unsigned char>((u >> 8) & 0xFF));
          out.push_back(static_cast<unsigned char>((u >> 16) & 0xFF));
          break;
        }
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(path, "cannot open file for writing");
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) fail(path, "write failed");
}

void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding) {
  MultichannelWaveform mc;
  mc.channels.push_back(wave);
  write_wav(path, mc, encoding);
}

}  // namespace s5eval
