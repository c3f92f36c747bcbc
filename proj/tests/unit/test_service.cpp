#include <chrono>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "hetbounds/error.hpp"
#include "hetbounds_cli/http.hpp"
#include "hetbounds_cli/report.hpp"
#include "hetbounds_cli/service.hpp"

using namespace hetbounds;
using namespace hetbounds::cli;

namespace {

const std::filesystem::path kFixtures = HETBOUNDS_FIXTURES_DIR;

ProblemFile worked() { return load_problem(kFixtures / "worked_example.json"); }

ProblemFile wide(std::size_t k) {
  json doc;
  for (std::size_t i = 0; i < k; ++i) {
    doc["settings"].push_back({{"label", "s" + std::to_string(i)},
                               {"theta_s", 0.01 * static_cast<double>(i)},
                               {"nu_l", -0.5},
                               {"nu_u", 0.5}});
  }
  doc["rho"] = {{"decay", {{"base", 0.9}}}};
  return parse_problem(doc);
}

}  // namespace

TEST_CASE("model endpoint matches the solve report") {
  ModelService svc(worked());
  const auto h = svc.health();
  CHECK(h.status == 200);
  CHECK(h.body.at("status") == "ok");

  const auto m = svc.model(std::nullopt);
  REQUIRE(m.status == 200);
  CHECK(m.body.at("feasible").get<bool>());
  CHECK(m.body.at("snapshot") == svc.base_snapshot());
  CHECK(m.body.at("marginals").at("j") == json::array({0.0, 2.0}));
  const json report = report_to_json(make_report(worked()));
  CHECK(report.at("univariate_table")[1].at("new_upper") == m.body.at("marginals").at("k")[1]);

  CHECK(svc.model(std::string("nope")).status == 404);
}

TEST_CASE("pin endpoint") {
  ModelService svc(worked());
  const auto r = svc.pin(R"({"setting":"j","value":0.0})");
  REQUIRE(r.status == 200);
  CHECK(r.body.at("feasible").get<bool>());
  CHECK(r.body.at("conditional").at("k") == json::array({0.0, 1.0}));

  const auto f = svc.pin(R"({"setting":"j","fraction":1})");
  CHECK(f.body.at("conditional").at("k") == json::array({1.0, 2.0}));

  const auto out = svc.pin(R"({"setting":"j","value":7})");
  REQUIRE(out.status == 200);
  CHECK_FALSE(out.body.at("feasible").get<bool>());
  CHECK_FALSE(out.body.contains("conditional"));

  const auto many = svc.pin(R"({"pins":[{"setting":"j","value":0.5}]})");
  CHECK(many.status == 200);
  CHECK(many.body.at("conditional").at("k") == json::array({0.0, 1.5}));

  for (const char* body : {"{not json", "[1,2]", R"({"setting":"zz","value":0})", R"({"setting":"j"})",
                           R"({"setting":"j","value":"x"})", R"({"setting":"j","value":0,"fraction":0})"}) {
    const auto e = svc.pin(body);
    CHECK(e.status >= 400);
    CHECK(e.status < 500);
    CHECK(e.body.at("error").contains("code"));
    CHECK(e.body.at("error").contains("message"));
  }
}

TEST_CASE("rho edits create new snapshots and leave the base intact") {
  ModelService svc(worked());
  const std::string base = svc.base_snapshot();
  const auto before = svc.model(std::nullopt).body;
  const auto r = svc.rho(R"({"edits":[{"j":"j","k":"k","rho_l":0.9,"rho_u":1.1}]})");
  REQUIRE(r.status == 200);
  const std::string id = r.body.at("snapshot");
  CHECK(id != base);
  CHECK(svc.model(std::nullopt).body == before);
  const auto edited = svc.model(id);
  REQUIRE(edited.status == 200);
  const auto pinned = svc.pin(json{{"setting", "j"}, {"value", 0.0}, {"snapshot", id}}.dump());
  CHECK(pinned.body.at("conditional").at("k")[1].get<double>() == doctest::Approx(0.1));

  const auto again = svc.rho(R"({"edits":[{"j":"j","k":"k","rho_l":0.9,"rho_u":1.1}]})");
  CHECK(again.body.at("snapshot") == id);
  const auto freed = svc.rho(R"({"edits":[{"j":"j","k":"k","unrestricted":true}]})");
  REQUIRE(freed.status == 200);
  CHECK(svc.rho(R"({"edits":[{"j":"j","k":"k","rho_l":-1,"rho_u":1.1}]})").status == 400);
  CHECK(svc.rho(R"({"nothing":1})").status == 400);
  CHECK(svc.rho(R"({"edits":[],"snapshot":"missing"})").status == 404);
}

TEST_CASE("large problems solve off the request path") {
  ModelService svc(wide(6), 4);
  const std::string id = svc.base_snapshot();
  REQUIRE(svc.wait(id));
  CHECK(svc.model(id).status == 200);
  const auto r = svc.rho(R"({"edits":[{"j":"s0","k":"s1","rho_l":0.99,"rho_u":1.01}]})");
  CHECK((r.status == 200 || r.status == 202));
  const std::string next = r.body.at("snapshot");
  REQUIRE(svc.wait(next));
  CHECK(svc.model(next).status == 200);
}

TEST_CASE("concurrent pins are independent reads") {
  ModelService svc(wide(12));
  const json base = svc.model(std::nullopt).body;
  std::vector<std::thread> threads;
  std::vector<int> ok(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        const auto r = svc.pin(json{{"setting", "s" + std::to_string(t)}, {"fraction", 0.05 * i}}.dump());
        ok[t] += r.status == 200 && r.body.at("feasible").get<bool>();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (int v : ok) CHECK(v == 20);
  CHECK(svc.model(std::nullopt).body == base);
}

TEST_CASE("http routes over a real socket") {
  ModelService svc(worked());
  httplib::Server server;
  mount_routes(server, svc, std::nullopt);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto h = client.Get("/api/health");
  REQUIRE(h);
  CHECK(h->status == 200);
  CHECK(h->get_header_value("Content-Type").find("application/json") != std::string::npos);

  auto m = client.Get("/api/model");
  REQUIRE(m);
  CHECK(json::parse(m->body).at("marginals").at("k") == json::array({0.0, 2.0}));

  auto p = client.Post("/api/pin", R"({"setting":"j","value":0.0})", "application/json");
  REQUIRE(p);
  CHECK(p->status == 200);
  CHECK(json::parse(p->body).at("conditional").at("k") == json::array({0.0, 1.0}));

  auto bad = client.Post("/api/pin", "{oops", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body).at("error").at("code") == "malformed_json");

  auto missing = client.Get("/api/nowhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body).contains("error"));

  auto rho = client.Post("/api/rho", R"({"edits":[{"j":"j","k":"k","rho_l":0.9,"rho_u":1.1}]})",
                         "application/json");
  REQUIRE(rho);
  const std::string id = json::parse(rho->body).at("snapshot");
  auto snap = client.Get("/api/model?snapshot=" + id);
  REQUIRE(snap);
  CHECK(snap->status == 200);

  auto index = client.Get("/");
  REQUIRE(index);
  CHECK(index->status == 200);

  server.stop();
  loop.join();
}

TEST_CASE("binding a taken port fails loudly") {
  ModelService svc(worked());
  httplib::Server holder;
  const int port = holder.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  CHECK_THROWS_AS(serve(svc, "127.0.0.1", port, std::nullopt), hetbounds::Error);
}
