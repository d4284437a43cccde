#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "leoiot/trace_io.hpp"

using namespace leoiot;

namespace {

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

} // namespace

TEST_SUITE("trace_io") {

TEST_CASE("numbers round trip")
{
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(22.1) == "22.1");
    CHECK(io::format_number(std::nan("")).empty());
    const double v = 1.0 / 3.0;
    CHECK(std::stod(io::format_number(v)) == v);
}

TEST_CASE("access records")
{
    ra::AccessRecord ok;
    ok.id = 0;
    ok.user = 4;
    ok.generation_time = 1.5;
    ok.outcome = ra::Outcome::success;
    ok.attempts = 2;
    ok.latency = 40.0;
    ok.completion_time = 60.0;
    ok.fates = {ra::AttemptFate::collided, ra::AttemptFate::success};
    ra::AccessRecord lost;
    lost.id = 1;
    lost.attempts = 1;
    lost.fates = {ra::AttemptFate::erased};
    std::vector<ra::AccessRecord> recs{ok, lost};
    std::ostringstream out;
    io::write_access_records(out, recs);
    const auto l = lines(out.str());
    REQUIRE(l.size() == 4);
    CHECK(l[0] == "# schema=leoiot.access version=1");
    CHECK(l[1].find("user,gen_time,outcome,attempts,latency_ms,departure_time") != std::string::npos);
    CHECK(l[2] == "0,4,1.5,success,2,40,60,0,collided|success");
    CHECK(l[3] == "1,0,0,failure,1,,,,erased");
}

TEST_CASE("packets and RAOs")
{
    backhaul::NetworkTrace t;
    backhaul::Packet p;
    p.exit = 3.0;
    p.status = backhaul::PacketStatus::erased;
    p.drop_node = 2;
    t.packets.push_back(p);
    std::ostringstream out;
    io::write_packets(out, t);
    CHECK(lines(out.str()).back() == "0,0,0,3,erased,2");

    std::vector<ra::RaoRecord> raos(1);
    raos[0].transmissions = 3;
    raos[0].collided = 2;
    raos[0].successes = 1;
    std::ostringstream r;
    io::write_rao_records(r, raos);
    CHECK(lines(r.str()).back() == "0,3,1,2,0,0");
}

}
