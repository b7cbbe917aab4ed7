#pragma once

#include <string>
#include <vector>

namespace rmdur {

// FNV-1a over the raw bytes, 16 hex digits; cheap, stable, good enough to tell
// two files apart in a run record
std::string fnv1a_digest(const std::string& bytes);

struct manifest_entry {
  std::string path;
  std::string digest;
};

// run provenance dropped next to the outputs: what ran, on which inputs, what
// it produced. deliberately carries the only timestamp any command writes, so
// reruns are byte-identical everywhere else.
struct run_manifest {
  std::string command;                   // subcommand plus salient flags
  std::vector<manifest_entry> inputs;    // files read, with digests
  std::vector<std::string> outputs;      // files written (relative names)
  unsigned long long seed = 0;
  bool has_seed = false;
  std::string config_digest;             // digest of the effective config json
};

std::string manifest_to_json(const run_manifest& m);
void write_manifest(const run_manifest& m, const std::string& dir);

}  // namespace rmdur
