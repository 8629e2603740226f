#!/usr/bin/env python3
"""
可达博弈验证/综合命令行快速启动脚本

    python run_reach_game.py verify ncnv --game fig1 --machine sigma0 --threshold 2
"""
import sys

from reach_runner.runner import main


if __name__ == "__main__":
    main(sys.argv[1:])
