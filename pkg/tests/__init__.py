# StateNet-PH Test Suite
