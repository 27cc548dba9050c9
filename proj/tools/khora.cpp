// khora command line front end. Subcommands land here as the library grows;
// everything real lives in core/.

#include <CLI11.hpp>
#include <cstdio>

#include "khora/util.hpp"

int main(int argc, char** argv) {
  CLI::App app{"annular link toolkit"};
  app.require_subcommand(0, 1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: KHORA_THREADS or all cores)");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) khora::set_thread_count(threads);

  if (app.get_subcommands().empty()) {
    std::puts(app.help().c_str());
    return 0;
  }
  return 0;
}
