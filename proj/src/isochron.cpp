#include "actv/isochron.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include <zlib.h>

#include "actv/error.hpp"
#include "text.hpp"

namespace actv {

bool BinaryProfile::any() const {
  return std::any_of(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; });
}

IsochronalStore::IsochronalStore(std::string camera_id, int grid_w, int grid_h, double alpha_L2)
    : camera_id_(std::move(camera_id)), grid_w_(grid_w), grid_h_(grid_h), alpha_(alpha_L2) {
  if (grid_w <= 0 || grid_h <= 0 || grid_w > 0xFFFF || grid_h > 0xFFFF) {
    throw InvalidParameter("isochronal store: grid dimensions out of range");
  }
  if (!(alpha_L2 >= 0.0 && alpha_L2 <= 1.0)) throw InvalidParameter("isochronal store: alpha must lie in [0, 1]");
  if (camera_id_.size() > 0xFFFF) throw InvalidParameter("isochronal store: camera id too long");
  means_.reserve(kMinutesPerDay);
  vars_.reserve(kMinutesPerDay);
  for (int m = 0; m < kMinutesPerDay; ++m) {
    means_.push_back(MotionFrame::zeros(grid_w, grid_h, m * kMsPerMinute));
    vars_.push_back(MotionFrame::zeros(grid_w, grid_h, m * kMsPerMinute));
  }
  days_.assign(kMinutesPerDay, 0);
  act_means_.assign(kMinutesPerDay, 0.0);
  act_vars_.assign(kMinutesPerDay, 0.0);
}

void IsochronalStore::check_minute(int minute) const {
  if (minute < 0 || minute >= kMinutesPerDay) {
    throw InvalidParameter("minute of day " + std::to_string(minute) + " outside [0, 1439]");
  }
}

void IsochronalStore::check_grid(const MotionFrame& f) const {
  if (f.grid_w != grid_w_ || f.grid_h != grid_h_ || f.blocks.size() != means_[0].blocks.size()) {
    throw RejectedInput("isochronal store: sample grid does not match store grid");
  }
}

void IsochronalStore::apply(int minute, const MotionFrame& x, const MotionFrame* mean_sq, double act,
                            double act_sq) {
  MotionFrame& mean = means_[minute];
  MotionFrame& var = vars_[minute];
  const bool bootstrap = days_[minute] == 0;
  const double a = alpha_;
  const double b = 1.0 - alpha_;
  for (std::size_t k = 0; k < mean.blocks.size(); ++k) {
    for (int c = 0; c < kBlockComponents; ++c) {
      const double xv = x.blocks[k].component(c);
      const double m = bootstrap ? xv : a * mean.blocks[k].component(c) + b * xv;
      double dev2;
      if (mean_sq) {
        const double sq = mean_sq->blocks[k].component(c);
        dev2 = std::max(0.0, sq - 2.0 * xv * m + m * m);
      } else {
        dev2 = (xv - m) * (xv - m);
      }
      mean.blocks[k].component(c) = m;
      double& v = var.blocks[k].component(c);
      v = bootstrap ? dev2 : a * v + b * dev2;
    }
  }
  const double am = bootstrap ? act : a * act_means_[minute] + b * act;
  const double adev2 = std::max(0.0, act_sq - 2.0 * act * am + am * am);
  act_means_[minute] = am;
  act_vars_[minute] = bootstrap ? adev2 : a * act_vars_[minute] + b * adev2;
  ++days_[minute];
}

void IsochronalStore::update(int minute, const MotionFrame& sample) {
  check_minute(minute);
  check_grid(sample);
  const double d = sample.mean_density();
  apply(minute, sample, nullptr, d, d * d);
}

void IsochronalStore::update(int minute, const MinuteSample& sample) {
  check_minute(minute);
  check_grid(sample.mean);
  check_grid(sample.mean_sq);
  apply(minute, sample.mean, &sample.mean_sq, sample.activity_mean, sample.activity_mean_sq);
}

SlotSnapshot IsochronalStore::query(int minute) const {
  check_minute(minute);
  SlotSnapshot s{means_[minute], vars_[minute], days_[minute], act_means_[minute], std::sqrt(act_vars_[minute])};
  for (auto& blk : s.std.blocks) {
    for (int c = 0; c < kBlockComponents; ++c) blk.component(c) = std::sqrt(blk.component(c));
  }
  return s;
}

BinaryProfile IsochronalStore::binarize(double epsilon) const {
  if (!(epsilon >= 0.0)) throw InvalidParameter("binarize: epsilon must be >= 0");
  BinaryProfile p{grid_w_, grid_h_, std::vector<std::uint8_t>(means_[0].blocks.size(), 0)};
  for (int m = 0; m < kMinutesPerDay; ++m) {
    if (days_[m] == 0) continue;
    const auto& blocks = means_[m].blocks;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      if (blocks[k].density > epsilon) p.flags[k] = 1;
    }
  }
  return p;
}

std::uint32_t IsochronalStore::days_observed(int minute) const {
  check_minute(minute);
  return days_[minute];
}

const MotionFrame& IsochronalStore::mean(int minute) const {
  check_minute(minute);
  return means_[minute];
}

const MotionFrame& IsochronalStore::variance(int minute) const {
  check_minute(minute);
  return vars_[minute];
}

double IsochronalStore::activity_mean(int minute) const {
  check_minute(minute);
  return act_means_[minute];
}

double IsochronalStore::activity_variance(int minute) const {
  check_minute(minute);
  return act_vars_[minute];
}

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_frame(std::string& out, const MotionFrame& f) {
  for (const auto& b : f.blocks) {
    for (int c = 0; c < kBlockComponents; ++c) put_f64(out, b.component(c));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t uint(int nbytes) {
    if (pos_ + static_cast<std::size_t>(nbytes) > bytes_.size()) throw LoadError("isochronal store: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < nbytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(nbytes);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::string str(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw LoadError("isochronal store: truncated file");
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void frame(MotionFrame& f) {
    for (auto& b : f.blocks) {
      for (int c = 0; c < kBlockComponents; ++c) b.component(c) = f64();
    }
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string IsochronalStore::serialize() const {
  std::string out = "ISO1";
  put_u16(out, kStoreVersion);
  put_u16(out, static_cast<std::uint16_t>(camera_id_.size()));
  out += camera_id_;
  put_u16(out, static_cast<std::uint16_t>(grid_w_));
  put_u16(out, static_cast<std::uint16_t>(grid_h_));
  put_f64(out, alpha_);
  for (int m = 0; m < kMinutesPerDay; ++m) {
    put_frame(out, means_[m]);
    put_frame(out, vars_[m]);
    put_f64(out, act_means_[m]);
    put_f64(out, act_vars_[m]);
    put_u32(out, days_[m]);
  }
  put_u32(out, crc_of(out));
  return out;
}

IsochronalStore IsochronalStore::deserialize(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "ISO1") != 0) throw LoadError("isochronal store: bad magic");
  if (bytes.size() < 8) throw LoadError("isochronal store: checksum mismatch (file too short)");
  std::string_view body(bytes.data(), bytes.size() - 4);
  Reader tail(std::string_view(bytes).substr(bytes.size() - 4));
  if (crc_of(body) != static_cast<std::uint32_t>(tail.uint(4))) {
    throw LoadError("isochronal store: checksum mismatch");
  }
  Reader r(body);
  r.uint(4);
  const auto version = r.uint(2);
  if (version != kStoreVersion) throw LoadError("isochronal store: unsupported version " + std::to_string(version));
  const auto id_len = r.uint(2);
  std::string id = r.str(id_len);
  const int gw = static_cast<int>(r.uint(2));
  const int gh = static_cast<int>(r.uint(2));
  const double alpha = r.f64();
  IsochronalStore s(std::move(id), gw, gh, alpha);
  for (int m = 0; m < kMinutesPerDay; ++m) {
    r.frame(s.means_[m]);
    r.frame(s.vars_[m]);
    s.act_means_[m] = r.f64();
    s.act_vars_[m] = r.f64();
    s.days_[m] = static_cast<std::uint32_t>(r.uint(4));
  }
  if (!r.done()) throw LoadError("isochronal store: trailing bytes before checksum");
  return s;
}

void IsochronalStore::persist(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

IsochronalStore IsochronalStore::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

ActivityStats activity_stats(const SlotSnapshot& slot) {
  ActivityStats s;
  s.days_observed = slot.days_observed;
  s.mean = slot.activity_mean;
  s.std = slot.activity_std;
  return s;
}

std::string profile_csv(const IsochronalStore& store) {
  std::string out = "minute,mean_activity,std_activity\n";
  for (int m = 0; m < kMinutesPerDay; ++m) {
    const ActivityStats st = activity_stats(store.query(m));
    out += std::to_string(m);
    out += ',';
    detail::append_double(out, st.mean);
    out += ',';
    detail::append_double(out, st.std);
    out += '\n';
  }
  return out;
}

}  // namespace actv
