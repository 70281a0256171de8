#include <algorithm>
#include <cmath>
#include <cstring>

#include "emomusic/dataset.hpp"
#include "emomusic/error.hpp"
#include "emomusic/text_io.hpp"

namespace emomusic {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

AudioSignal parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorKind::CorruptHeader, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    // A truncated final data chunk is tolerated; anything else must fit.
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorKind::CorruptHeader, "fmt chunk too short");
      const auto* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) throw Error(ErrorKind::CorruptHeader, "extensible fmt chunk too short");
        format = read_u16(f + 24);  // first two bytes of the sub-format GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.subspan(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt || !have_data) throw Error(ErrorKind::CorruptHeader, "missing fmt or data chunk");
  if (format != kFormatPcm || bits != 16)
    throw Error(ErrorKind::UnsupportedEncoding,
                "only 16-bit integer PCM is supported (format " + std::to_string(format) + ", " +
                    std::to_string(bits) + " bits)");
  if (channels < 1 || channels > 2) throw Error(ErrorKind::UnsupportedEncoding, "only mono or stereo is supported");
  if (rate == 0) throw Error(ErrorKind::CorruptHeader, "zero sample rate");

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error(ErrorKind::CorruptHeader, "no samples");

  AudioSignal audio;
  audio.sample_rate_hz = static_cast<double>(rate);
  audio.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const auto* p = data.data() + i * frame_bytes;
    double sum = 0.0;
    for (std::size_t c = 0; c < channels; ++c)
      sum += static_cast<double>(static_cast<std::int16_t>(read_u16(p + 2 * c))) / 32768.0;
    audio.samples[i] = sum / channels;
  }
  return audio;
}

AudioSignal load_wav(const fs::path& path) {
  const std::string raw = text::read_file(path);
  try {
    return parse_wav({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const AudioSignal& audio) {
  const auto n = static_cast<std::uint32_t>(audio.samples.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate_hz));
  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  put_tag(out, "RIFF");
  put_u32(out, 36 + 2 * n);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, 2 * n);
  for (double s : audio.samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

void save_wav(const AudioSignal& audio, const fs::path& path) {
  const auto bytes = encode_wav(audio);
  text::write_file(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

}  // namespace emomusic
