// experiment orchestration; see include/speclab/lab.hpp
