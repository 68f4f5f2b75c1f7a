// Placeholder entry point; subcommands are wired up once the pipeline
// stages exist.
#include <cstdio>

int main() {
  std::puts("mpep: pipeline CLI (under construction)");
  return 0;
}
