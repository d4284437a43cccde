#include "leoiot/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <fmt/core.h>

namespace leoiot::io {

void write_schema(std::ostream& out, const std::string& kind, const std::string& header)
{
    out << "# schema=leoiot." << kind << " version=" << schema_version << '\n' << header << '\n';
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return {};
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), end};
}

std::string to_string(ra::AttemptFate fate)
{
    switch (fate) {
    case ra::AttemptFate::success: return "success";
    case ra::AttemptFate::collided: return "collided";
    case ra::AttemptFate::erased: return "erased";
    case ra::AttemptFate::no_grant: return "no_grant";
    }
    return "?";
}

std::string to_string(backhaul::PacketStatus status)
{
    switch (status) {
    case backhaul::PacketStatus::delivered: return "delivered";
    case backhaul::PacketStatus::erased: return "erased";
    case backhaul::PacketStatus::overflow: return "overflow";
    }
    return "?";
}

void write_access_records(std::ostream& out, std::span<const ra::AccessRecord> records)
{
    write_schema(out, "access", "id,user,gen_time,outcome,attempts,latency_ms,departure_time,t_extra,fates");
    for (const ra::AccessRecord& r : records) {
        std::string fates;
        for (std::size_t i = 0; i < r.fates.size(); ++i) {
            if (i)
                fates += '|';
            fates += to_string(r.fates[i]);
        }
        out << r.id << ',' << r.user << ',' << format_number(r.generation_time) << ','
            << (r.succeeded() ? "success" : "failure") << ',' << r.attempts << ','
            << (r.latency ? format_number(*r.latency) : "") << ','
            << (r.succeeded() ? format_number(r.completion_time) : "") << ','
            << (r.succeeded() ? format_number(r.t_extra) : "") << ',' << fates << '\n';
    }
}

void write_rao_records(std::ostream& out, std::span<const ra::RaoRecord> raos)
{
    write_schema(out, "rao", "time,transmissions,successes,collided,erased,demoted");
    for (const ra::RaoRecord& r : raos)
        out << format_number(r.time) << ',' << r.transmissions << ',' << r.successes << ',' << r.collided << ','
            << r.erased << ',' << r.demoted << '\n';
}

void write_packets(std::ostream& out, const backhaul::NetworkTrace& trace)
{
    write_schema(out, "packet", "index,gen_time,injection_time,exit_time,status,drop_node");
    for (const backhaul::Packet& p : trace.packets)
        out << p.index << ',' << format_number(p.origin) << ',' << format_number(p.injection) << ','
            << format_number(p.exit) << ',' << to_string(p.status) << ',' << p.drop_node << '\n';
}

void write_sweep_rows(std::ostream& out, std::span<const backhaul::SweepRow> rows)
{
    write_schema(out, "sweep",
                 "rho,hops,link_erasure,mode,replication,offered,delivered,mean_system_time,average_age,"
                 "mean_peak_age,delivery_fraction,ra_success");
    for (const backhaul::SweepRow& r : rows)
        out << format_number(r.load) << ',' << r.hops << ',' << format_number(r.erasure) << ',' << r.mode.name()
            << ',' << r.replication << ',' << r.offered << ',' << r.delivered << ','
            << format_number(r.mean_system_time) << ',' << format_number(r.average_age) << ','
            << format_number(r.mean_peak_age) << ',' << format_number(r.delivery_fraction) << ','
            << (r.ra_success ? format_number(*r.ra_success) : "") << '\n';
}

} // namespace leoiot::io
