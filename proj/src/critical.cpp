// critical-vector solver; see include/speclab/critical.hpp
