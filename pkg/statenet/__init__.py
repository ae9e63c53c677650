# StateNet-PH - Dynamic state detection with transition networks and persistent homology
# Statenet Package
__version__ = "1.0.0"
