#ifndef LEOIOT_TRACE_IO_HPP_
#define LEOIOT_TRACE_IO_HPP_

#include <ostream>
#include <span>
#include <string>

#include "leoiot/backhaul_sim.hpp"
#include "leoiot/ra_sim.hpp"
#include "leoiot/sweep.hpp"

namespace leoiot::io {

/// Bumped whenever a column is added, removed or reinterpreted.
inline constexpr int schema_version = 1;

/// "# schema=leoiot.<kind> version=<n>" followed by the column header.
void write_schema(std::ostream& out, const std::string& kind, const std::string& header);

/// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double v);

void write_access_records(std::ostream& out, std::span<const ra::AccessRecord> records);
void write_rao_records(std::ostream& out, std::span<const ra::RaoRecord> raos);
void write_packets(std::ostream& out, const backhaul::NetworkTrace& trace);
void write_sweep_rows(std::ostream& out, std::span<const backhaul::SweepRow> rows);

std::string to_string(ra::AttemptFate fate);
std::string to_string(backhaul::PacketStatus status);

} // namespace leoiot::io

#endif // LEOIOT_TRACE_IO_HPP_
