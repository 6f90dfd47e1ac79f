"""
📋 RAM+ 测试套件

包含：
- test_common.py: 异常、配置、计步器与只读表
- test_ram_core.py: 解析器、三种解释器、图输入
- test_lowering.py: 三个翻译、结构化编译、可恢复包装、锁步检查
- test_arith.py: 预处理上下文与各类常数时间查询
- test_mem_ext.py: 惰性数组与 trie 数组
- test_ca_compile.py: 自动机模拟、约定检查、组合与分块编译
- test_harness.py: 参数生成、N 扫描、预言机对照、报告与命令行
"""
