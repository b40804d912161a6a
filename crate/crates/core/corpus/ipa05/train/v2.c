void loop(int j, int l) {
    while (l >= j) {
        printf("%d\n", j);
        ++j;
    }
}

int main() {
    int j, l;
    scanf("%d", &l);
    j = 1;
    loop(j, l);
    return 0;
}
