from setuptools import find_packages, setup


with open('README.md') as f:
    long_description = f.read()

setup(
    name='conecert',
    description='Certified uniform hyperbolicity of explicit maps',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests*']),
    use_scm_version=True,
    # Needed to let mypy use package for type hints
    zip_safe=False,
    package_data={"conecert": ["py.typed"]},
    setup_requires=['setuptools_scm'],
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.21,<3',
        'typing-extensions>=3.7.4'
    ],
    entry_points={
        'console_scripts': ['conecert=conecert.cli:entry_point']
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Mathematics'
    ]
)
