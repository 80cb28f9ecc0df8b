"""
LinkSched - Main Entry Point
Link scheduling for D2D networks with a graph-embedding kernel SVM
"""

from src import launch, __version__

# Run command line
if __name__ == "__main__" :
    launch()
