from setuptools import setup, find_packages
import recipsum

setup(
    name="recipsum",
    version=recipsum.__version__,
    description="Exact reciprocal sums and lattice-point counts for linear forms",
    long_description=open("README.rst").read(),
    license="BSD",
    packages=find_packages(exclude=['tests']),
    include_package_data=True,
    install_requires=['scipy>=1.12.0', 'numpy>=1.17.3', 'pandas>=1.3.0', 'mpmath>=1.2.0'],
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['recipsum=recipsum.cli:main']},
    zip_safe=False,
    keywords='diophantine approximation lattice geometry of numbers',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
