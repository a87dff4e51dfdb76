#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "supplynet/generators.hpp"
#include "supplynet/io.hpp"

using namespace supplynet;

namespace {

NetworkFile edge_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_csv(in);
}

NetworkFile io_table(const std::string& text, double threshold = 0.0) {
  std::istringstream in(text);
  return parse_io_table(in, threshold);
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("supplynet_io_" + name);
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

}  // namespace

TEST(EdgeCsv, Basic) {
  const auto f = edge_csv("source,target\n1,2\n");
  EXPECT_EQ(f.network.node_count(), 2u);
  EXPECT_EQ(f.network.edge_count(), 1u);
  EXPECT_EQ(f.labels, (std::vector<std::string>{"1", "2"}));
}

TEST(EdgeCsv, FirstAppearanceIdsAndDuplicates) {
  const auto f = edge_csv("\xEF\xBB\xBFsource,target\r\nsteel,car\r\n\r\nore,steel\r\nsteel,car\r\n");
  EXPECT_EQ(f.labels, (std::vector<std::string>{"steel", "car", "ore"}));
  EXPECT_EQ(f.duplicate_edges, 1u);
  EXPECT_EQ(f.network.edge_count(), 2u);
  EXPECT_TRUE(f.network.acyclic());
}

TEST(EdgeCsv, QuotedNames) {
  const auto f = edge_csv("source,target\n\"Food, beverages\",\"Retail \"\"trade\"\"\"\n");
  EXPECT_EQ(f.labels[0], "Food, beverages");
  EXPECT_EQ(f.labels[1], "Retail \"trade\"");
  std::ostringstream out;
  write_edge_csv(out, f.network, f.labels);
  std::istringstream back(out.str());
  EXPECT_EQ(parse_edge_csv(back).labels, f.labels);
}

TEST(EdgeCsv, Errors) {
  try {
    edge_csv("source,target\n1,2\n3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    edge_csv("source,target\n1,2\n4,4\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(edge_csv("from,to\n1,2\n"), ParseError);
  EXPECT_THROW(edge_csv("source,target\n"), ValidationError);
  EXPECT_THROW(parse_edge_csv(std::string("/nonexistent/file.csv")), ValidationError);
}

TEST(EdgeCsv, LargeFile) {
  std::ostringstream text;
  text << "source,target\n";
  for (int i = 1; i < 626; ++i) text << i << ',' << i + 1 << '\n';
  EXPECT_EQ(edge_csv(text.str()).network.node_count(), 626u);
}

TEST(IoTable, Examples) {
  const auto one = io_table(",a,b\na,0,5\nb,0,0\n");
  EXPECT_EQ(one.network.edge_count(), 1u);
  EXPECT_EQ(one.network.edges()[0], (Edge{0, 1}));
  const auto dense = io_table(",a,b,c\na,9,1,2\nb,3,9,4\nc,5,6,9\n");
  EXPECT_EQ(dense.network.edge_count(), 6u);
  EXPECT_FALSE(dense.network.acyclic());
  const auto thr = io_table(",a,b,c\na,9,1,2\nb,3,9,4\nc,5,6,9\n", 3.0);
  EXPECT_EQ(thr.network.edge_count(), 3u);
}

TEST(IoTable, Errors) {
  EXPECT_THROW(io_table(",a,b\na,0,5\n"), ParseError);
  EXPECT_THROW(io_table(",a,b\na,0,5\nb,0\n"), ParseError);
  EXPECT_THROW(io_table(",a,b\na,0,x\nb,0,0\n"), ParseError);
  EXPECT_THROW(io_table(",a,b\na,0,1\nc,0,0\n"), ParseError);
}

TEST(IoTable, FullyDenseFiftySix) {
  std::ostringstream t;
  t << "";
  for (int c = 0; c < 56; ++c) t << ",s" << c;
  t << '\n';
  for (int r = 0; r < 56; ++r) {
    t << 's' << r;
    for (int c = 0; c < 56; ++c) t << ',' << (r * 7 + c) % 5 + 1;
    t << '\n';
  }
  const auto f = io_table(t.str());
  EXPECT_EQ(f.network.edge_count(), 56u * 55u);
  EXPECT_EQ(f.network.max_out_degree(), 55u);
}

TEST(NetworkJson, RoundTrip) {
  const auto nets = {generate_parallel(6, 2, 3, 1, 2), generate_rdag(12, 0.3, 5),
                     generate_trellis(3, 4, 0.5, 2)};
  for (const auto& net : nets) {
    std::ostringstream out;
    write_network_json(out, net);
    std::istringstream in(out.str());
    const auto back = parse_network_json(in);
    EXPECT_EQ(back.network, net);
    std::ostringstream again;
    write_network_json(again, back.network);
    EXPECT_EQ(again.str(), out.str());
  }
}

TEST(NetworkJson, Validation) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_network_json(in);
  };
  EXPECT_THROW(parse("{\"k\": 2}"), ValidationError);
  EXPECT_THROW(parse("{\"schema\": 1, \"k\": 0}"), ValidationError);
  EXPECT_THROW(parse("{\"schema\": 1, \"k\": 2, \"edges\": [[1, 3]]}"), ValidationError);
  EXPECT_THROW(parse("{\"schema\": 1, \"k\": 2, \"edges\": [[1, 1]]}"), ValidationError);
  EXPECT_THROW(parse("{\"schema\": 1, \"k\": 2, \"edges\": [[1, 2], [2, 1]], \"acyclic\": true}"),
               ValidationError);
  EXPECT_THROW(parse("{\"schema\": 1, \"k\": 2, \"tiers\": [1]}"), ValidationError);
  EXPECT_THROW(parse("{not json"), ParseError);
  const auto ok = parse("{\"schema\": 1, \"k\": 3, \"n\": 2, \"edges\": [[1, 2], [2, 1]]}");
  EXPECT_FALSE(ok.network.acyclic());
  EXPECT_EQ(ok.network.suppliers(), 2u);
}

TEST(LoadNetwork, DetectsFormats) {
  const auto e = temp_file("edges.csv", "source,target\na,b\n");
  EXPECT_EQ(load_network(e.string()).format, NetworkFormat::kEdgeCsv);
  const auto t = temp_file("table.csv", ",a,b\na,0,1\nb,1,0\n");
  EXPECT_EQ(load_network(t.string()).format, NetworkFormat::kIoTable);
  const auto j = temp_file("net.json", "{\"schema\": 1, \"k\": 2, \"edges\": [[1, 2]]}");
  const auto jf = load_network(j.string(), std::nullopt, 0.0, 3);
  EXPECT_EQ(jf.format, NetworkFormat::kNetworkJson);
  EXPECT_EQ(jf.network.suppliers(), 3u);
  EXPECT_EQ(jf.provenance, j.string());
}

TEST(Csv, LocaleFreeShortestNumbers) {
  std::ostringstream out;
  CsvWriter w(out, {"a", "b", "c", "d", "e"});
  w.row(0.1, 1234567.0, true, std::optional<double>{}, std::string("x,y"));
  EXPECT_EQ(out.str(), "a,b,c,d,e\n0.1,1234567,true,,\"x,y\"\n");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(*parse_double("2.5"), 2.5);
  EXPECT_FALSE(parse_double("2.5x"));
}
