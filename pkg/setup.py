"""
LinkSched - Setup Script
Installation script for LinkSched
"""

from setuptools import setup, find_packages

from linksched import __version__

# Read README for long description
with open( "README.md", "r", encoding= "utf-8" ) as fh :
    long_description = fh.read()

setup(
    name= "linksched",
    version= __version__,
    description= "Link scheduling for D2D networks with a graph-embedding kernel SVM",
    long_description= long_description,
    long_description_content_type= "text/markdown",
    packages= find_packages( exclude= [ "tests", "tests.*" ] ),
    py_modules= [ "linksched" ],
    classifiers= [
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Topic :: Scientific/Engineering"
    ],
    python_requires= ">=3.8",
    install_requires= [
        "numpy>=1.22"
    ],
    extras_require= {
        "view": [ "PyQt6>=6.0.0" ],
        "test": [ "pytest>=7.0", "scipy>=1.8" ]
    },
    entry_points= {
        "console_scripts": [
            "linksched=src.run:launch"
        ]
    },
    include_package_data= True,
    data_files= [
        ( "config", [ "config/default.json" ] )
    ]
)
