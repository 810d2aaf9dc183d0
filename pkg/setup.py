
from setuptools import setup, find_packages


install_requires = [
    "torch>=1.8",
    "matplotlib>=3.2",
]


setup(
    name="speckit",
    version="0.1",
    description="Specular derivatives and specular Euler schemes by PyTorch",
    packages=find_packages(exclude=["tests"]),
    install_requires=install_requires,
    python_requires=">=3.8",
    entry_points={
        "console_scripts": ["speckit=speckit.cli:main"],
    },
)
