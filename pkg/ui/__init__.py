# UI module for the command-line interface
