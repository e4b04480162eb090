// hypertube geometry; see include/speclab/hypertube.hpp
