#include <cstdio>

int main() {
  std::printf("floq: subcommands pending\n");
  return 0;
}
