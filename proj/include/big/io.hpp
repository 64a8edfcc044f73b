#pragma once

// Trajectory CSV and binary field snapshots.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "big/marcher.hpp"
#include "big/piston.hpp"

namespace big {

inline constexpr const char* kTrajectoryHeader =
    "t,h_x,h_y,ell_x,ell_y,omega,E_total,E_kin,E_compress,E_body,E_spring,D_visc,D_damp,mass,picard_iters,"
    "contraction_max,distortion";

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct TrajectoryRow {
  double t = 0.0;
  Vec2 h, ell;
  double omega = 0.0;
  double E_total = 0.0, E_kin = 0.0, E_compress = 0.0, E_body = 0.0, E_spring = 0.0;
  double D_visc = 0.0, D_damp = 0.0, mass = 0.0;
  int picard_iters = 0;
  double contraction_max = 0.0, distortion = 0.0;
};

inline TrajectoryRow to_row(const StepRecord& r) {
  TrajectoryRow w;
  w.t = r.t;
  w.h = r.h;
  w.ell = r.ell;
  w.omega = r.omega;
  w.E_total = r.energy.E_total();
  w.E_kin = r.energy.E_kin;
  w.E_compress = r.energy.E_compress;
  w.E_body = r.energy.E_body;
  w.E_spring = r.energy.E_spring;
  w.D_visc = r.energy.D_visc();
  w.D_damp = r.energy.D_damp;
  w.mass = r.energy.mass;
  w.picard_iters = r.picard_iters;
  w.contraction_max = r.contraction_max;
  w.distortion = r.distortion;
  return w;
}

/// 1D rows: E_kin is the gas kinetic energy, E_compress the internal energy,
/// mass the total of both columns; absent fields are zero.
inline TrajectoryRow to_row(const PistonRecord& r) {
  TrajectoryRow w;
  w.t = r.t;
  w.h = {r.h, 0.0};
  w.ell = {r.ell, 0.0};
  w.E_total = r.energy.total();
  w.E_kin = r.energy.kinetic_gas;
  w.E_compress = r.energy.internal;
  w.E_body = r.energy.kinetic_piston;
  w.E_spring = r.energy.spring;
  w.D_visc = r.D_visc;
  w.D_damp = r.D_damp;
  w.mass = r.mass_left + r.mass_right;
  w.picard_iters = r.newton_iters;
  return w;
}

class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out_ << kTrajectoryHeader << '\n';
  }

  void write(const TrajectoryRow& r) {
    const double v[] = {r.t, r.h.x, r.h.y, r.ell.x, r.ell.y, r.omega, r.E_total, r.E_kin, r.E_compress,
                        r.E_body, r.E_spring, r.D_visc, r.D_damp, r.mass};
    for (double x : v) out_ << format_double(x) << ',';
    out_ << r.picard_iters << ',' << format_double(r.contraction_max) << ',' << format_double(r.distortion) << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

inline std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw std::runtime_error(path.string() + ": unexpected trajectory header");
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error(path.string() + ": cannot read '" + cell + "' as a number");
      v.push_back(x);
    }
    if (v.size() != 17) throw std::runtime_error(path.string() + ": row with " + std::to_string(v.size()) + " fields");
    TrajectoryRow r;
    r.t = v[0];
    r.h = {v[1], v[2]};
    r.ell = {v[3], v[4]};
    r.omega = v[5];
    r.E_total = v[6];
    r.E_kin = v[7];
    r.E_compress = v[8];
    r.E_body = v[9];
    r.E_spring = v[10];
    r.D_visc = v[11];
    r.D_damp = v[12];
    r.mass = v[13];
    r.picard_iters = static_cast<int>(v[14]);
    r.contraction_max = v[15];
    r.distortion = v[16];
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Snapshots: 64-byte ASCII header "BIG1 nr=<..> nt=<..> t=<..>" padded with
// spaces, then nr*nt little-endian float64 values, r outer and theta inner.

struct Snapshot {
  int nr = 0;
  int nt = 0;
  double t = 0.0;
  std::vector<double> data;
};

inline void write_snapshot(const std::filesystem::path& path, int nr, int nt, double t,
                           const std::vector<double>& data) {
  if (data.size() != static_cast<std::size_t>(nr) * nt) throw std::invalid_argument("snapshot size mismatch");
  std::string header = "BIG1 nr=" + std::to_string(nr) + " nt=" + std::to_string(nt) + " t=" + format_double(t);
  if (header.size() > 64) throw std::invalid_argument("snapshot header too long");
  header.resize(64, ' ');
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(header.data(), 64);
  for (double v : data) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), 8);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 64> hdr{};
  in.read(hdr.data(), 64);
  if (in.gcount() != 64) throw std::runtime_error(path.string() + ": truncated header");
  Snapshot s;
  char tbuf[40] = {};
  const std::string h(hdr.data(), 64);
  if (std::sscanf(h.c_str(), "BIG1 nr=%d nt=%d t=%39s", &s.nr, &s.nt, tbuf) != 3 || s.nr <= 0 || s.nt <= 0)
    throw std::runtime_error(path.string() + ": malformed header");
  if (std::from_chars(tbuf, tbuf + std::strlen(tbuf), s.t).ec != std::errc())
    throw std::runtime_error(path.string() + ": malformed time");
  s.data.resize(static_cast<std::size_t>(s.nr) * s.nt);
  for (double& v : s.data) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), 8);
    if (in.gcount() != 8) throw std::runtime_error(path.string() + ": truncated data");
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v = std::bit_cast<double>(bits);
  }
  return s;
}

/// Field names written per snapshot; "body" is a 1 x 6 record
/// (h_tilde_x, h_tilde_y, ell_tilde_x, ell_tilde_y, omega_tilde, angle).
inline const std::array<const char*, 6>& snapshot_fields() {
  static const std::array<const char*, 6> f = {"rho_tilde", "u_tilde_x", "u_tilde_y", "disp_x", "disp_y", "body"};
  return f;
}

inline std::filesystem::path snapshot_path(const std::filesystem::path& dir, long step, const std::string& field) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%08ld_%s.bin", step, field.c_str());
  return dir / buf;
}

inline void write_state_snapshot(const std::filesystem::path& dir, const Simulation& sim) {
  const Grid& g = sim.grid();
  const long step = sim.step_index();
  const double t = sim.time();
  write_snapshot(snapshot_path(dir, step, "rho_tilde"), g.nr(), g.nt(), t, sim.fluid().rho_tilde);
  write_snapshot(snapshot_path(dir, step, "u_tilde_x"), g.nr(), g.nt(), t, sim.fluid().u_tilde.x);
  write_snapshot(snapshot_path(dir, step, "u_tilde_y"), g.nr(), g.nt(), t, sim.fluid().u_tilde.y);
  write_snapshot(snapshot_path(dir, step, "disp_x"), g.nr(), g.nt(), t, sim.map().disp.x);
  write_snapshot(snapshot_path(dir, step, "disp_y"), g.nr(), g.nt(), t, sim.map().disp.y);
  const BodyState& b = sim.body();
  write_snapshot(snapshot_path(dir, step, "body"), 1, 6, t,
                 {b.h_tilde.x, b.h_tilde.y, b.ell_tilde.x, b.ell_tilde.y, b.omega_tilde, b.angle});
}

}  // namespace big
